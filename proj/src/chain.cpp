#include "lowbias/chain.hpp"

#include <algorithm>
#include <stdexcept>

#include "lowbias/errors.hpp"
#include "lowbias/hpoly.hpp"

namespace lowbias {

PartialDerivativeTable::PartialDerivativeTable(int slots) : q_(slots) {
    if (slots < 1) throw std::invalid_argument("derivative table needs at least one slot");
}

void PartialDerivativeTable::provide_order(int order) {
    if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
    orders_.insert(order);
}

void PartialDerivativeTable::set(std::vector<int> index, double value) {
    if (index.empty()) throw std::invalid_argument("empty derivative index");
    for (int i : index)
        if (i < 1 || i > q_) throw std::invalid_argument("derivative index out of range");
    provide_order(static_cast<int>(index.size()));
    std::sort(index.begin(), index.end());
    g_[std::move(index)] = value;
}

double PartialDerivativeTable::get(std::vector<int> index) const {
    int order = static_cast<int>(index.size());
    if (!has_order(order))
        throw unavailable_error("g derivatives of order " + std::to_string(order));
    std::sort(index.begin(), index.end());
    auto it = g_.find(index);
    return it == g_.end() ? 0.0 : it->second;
}

SDerivativeMoments::SDerivativeMoments(int slots, Generator gen)
    : q_(slots), gen_(std::move(gen)) {
    if (slots < 1) throw std::invalid_argument("statistic count must be >= 1");
}

std::string SDerivativeMoments::canonical_key(const std::vector<Factor>& factors) {
    constexpr int kVars = 3;
    int perm[kVars];
    std::string best;
    for (perm[0] = 0; perm[0] < kVars; ++perm[0])
        for (perm[1] = 0; perm[1] < kVars; ++perm[1]) {
            if (perm[1] == perm[0]) continue;
            perm[2] = 3 - perm[0] - perm[1];
            std::vector<std::string> parts;
            parts.reserve(factors.size());
            for (const Factor& f : factors) {
                int counts[kVars] = {0, 0, 0};
                for (size_t v = 0; v < f.arg.size(); ++v) {
                    if (f.arg[v] == 0) continue;
                    if (v >= kVars) throw std::invalid_argument("at most three variables");
                    counts[perm[v]] = f.arg[v];
                }
                std::string part = std::to_string(f.index) + ":";
                for (int c : counts) part += std::to_string(c);
                parts.push_back(std::move(part));
            }
            std::sort(parts.begin(), parts.end());
            std::string key;
            for (const std::string& p : parts) key += p + "|";
            if (best.empty() || key < best) best = std::move(key);
        }
    return best;
}

void SDerivativeMoments::set(const std::vector<Factor>& factors, double value) {
    for (const Factor& f : factors)
        if (f.index < 1 || f.index > q_)
            throw std::invalid_argument("statistic index out of range");
    values_[canonical_key(factors)] = value;
}

bool SDerivativeMoments::has(const std::vector<Factor>& factors) const {
    if (values_.count(canonical_key(factors)) > 0) return true;
    return gen_ && gen_(factors).has_value();
}

double SDerivativeMoments::get(const std::vector<Factor>& factors) const {
    std::string key = canonical_key(factors);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    if (gen_) {
        std::optional<double> v = gen_(factors);
        if (v) {
            values_[key] = *v;
            return *v;
        }
    }
    throw unavailable_error("S-moment " + key);
}

namespace {

using Fac = SDerivativeMoments::Factor;

// Iterates index tuples in {1..q}^k and accumulates g(tuple) * term(tuple).
template <typename Term>
double contract(const PartialDerivativeTable& g, int k, Term term) {
    std::vector<int> idx(static_cast<size_t>(k), 1);
    double acc = 0.0;
    int q = g.slots();
    while (true) {
        double gv = g.get(idx);
        if (gv != 0.0) acc += gv * term(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == q) {
            idx[static_cast<size_t>(pos)] = 1;
            --pos;
        }
        if (pos < 0) break;
        ++idx[static_cast<size_t>(pos)];
    }
    return acc;
}

void require_orders(const PartialDerivativeTable& g, int up_to) {
    for (int k = 1; k <= up_to; ++k)
        if (!g.has_order(k)) throw unavailable_error("g derivatives of order " + std::to_string(k));
}

}  // namespace

double chain_bundle(const PartialDerivativeTable& g, const SDerivativeMoments& s,
                    BundlePattern pattern) {
    const auto v = [&s](std::vector<Fac> f) { return s.get(f); };

    switch (pattern) {
        case BundlePattern::A2: {
            require_orders(g, 2);
            double t = contract(g, 2, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}});
            });
            t += contract(g, 1, [&](const std::vector<int>& i) { return v({{i[0], {2}}}); });
            return t;
        }
        case BundlePattern::A3: {
            require_orders(g, 3);
            double t = contract(g, 3, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}, {i[2], {1}}});
            });
            t += contract(g, 2, [&](const std::vector<int>& i) {
                return 3.0 * v({{i[0], {1}}, {i[1], {2}}});
            });
            t += contract(g, 1, [&](const std::vector<int>& i) { return v({{i[0], {3}}}); });
            return t;
        }
        case BundlePattern::A4: {
            require_orders(g, 4);
            double t = contract(g, 4, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}, {i[2], {1}}, {i[3], {1}}});
            });
            t += contract(g, 3, [&](const std::vector<int>& i) {
                return 6.0 * v({{i[0], {1}}, {i[1], {1}}, {i[2], {2}}});
            });
            t += contract(g, 2, [&](const std::vector<int>& i) {
                return 4.0 * v({{i[0], {1}}, {i[1], {3}}}) + 3.0 * v({{i[0], {2}}, {i[1], {2}}});
            });
            t += contract(g, 1, [&](const std::vector<int>& i) { return v({{i[0], {4}}}); });
            return t;
        }
        case BundlePattern::A2B2: {
            require_orders(g, 4);
            double t = contract(g, 4, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}}) * v({{i[2], {1}}, {i[3], {1}}});
            });
            t += contract(g, 3, [&](const std::vector<int>& i) {
                // S_ij(a,a) S_k(b^2) + S_ij(b,b) S_k(a^2): equal by exchangeability
                return 2.0 * v({{i[0], {1}}, {i[1], {1}}}) * v({{i[2], {2}}}) +
                       4.0 * v({{i[0], {1, 1}}, {i[1], {1, 0}}, {i[2], {0, 1}}});
            });
            t += contract(g, 2, [&](const std::vector<int>& i) {
                // 2 S_ij(a,ab^2) + 2 S_ij(b,a^2 b) collapse to one canonical entry
                return 4.0 * v({{i[0], {1, 0}}, {i[1], {1, 2}}}) +
                       v({{i[0], {2}}}) * v({{i[1], {2}}}) +
                       2.0 * v({{i[0], {1, 1}}, {i[1], {1, 1}}});
            });
            t += contract(g, 1, [&](const std::vector<int>& i) { return v({{i[0], {2, 2}}}); });
            return t;
        }
        case BundlePattern::A2B3: {
            require_orders(g, 5);
            double t = contract(g, 1, [&](const std::vector<int>& i) { return v({{i[0], {2, 3}}}); });
            t += contract(g, 2, [&](const std::vector<int>& i) {
                return 2.0 * v({{i[0], {1, 0}}, {i[1], {1, 3}}}) +
                       3.0 * v({{i[0], {0, 1}}, {i[1], {2, 2}}}) +
                       v({{i[0], {2}}}) * v({{i[1], {3}}}) +
                       6.0 * v({{i[0], {1, 1}}, {i[1], {1, 2}}}) +
                       3.0 * v({{i[0], {0, 2}}, {i[1], {2, 1}}});
            });
            t += contract(g, 3, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}}) * v({{i[2], {3}}}) +
                       3.0 * v({{i[0], {0, 1}}, {i[1], {0, 1}}, {i[2], {2, 1}}}) +
                       6.0 * v({{i[0], {1, 0}}, {i[1], {0, 1}}, {i[2], {1, 2}}}) +
                       6.0 * v({{i[0], {1, 0}}, {i[1], {1, 1}}, {i[2], {0, 2}}}) +
                       3.0 * v({{i[0], {1}}, {i[2], {2}}}) * v({{i[1], {2}}}) +
                       6.0 * v({{i[0], {0, 1}}, {i[1], {1, 1}}, {i[2], {1, 1}}});
            });
            t += contract(g, 4, [&](const std::vector<int>& i) {
                return v({{i[0], {2}}}) * v({{i[1], {1}}, {i[2], {1}}, {i[3], {1}}}) +
                       6.0 * v({{i[0], {1, 1}}, {i[1], {1, 0}}, {i[2], {0, 1}}, {i[3], {0, 1}}}) +
                       3.0 * v({{i[0], {2}}, {i[3], {1}}}) * v({{i[1], {1}}, {i[2], {1}}});
            });
            t += contract(g, 5, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}}) *
                       v({{i[2], {1}}, {i[3], {1}}, {i[4], {1}}});
            });
            return t;
        }
        case BundlePattern::A2B2C2: {
            require_orders(g, 6);
            double t = contract(g, 1, [&](const std::vector<int>& i) {
                return v({{i[0], {2, 2, 2}}});
            });
            t += contract(g, 2, [&](const std::vector<int>& i) {
                // letter permutations of one structural term collapse, so the
                // printed cyclic sums appear as integer multipliers here
                return 6.0 * v({{i[0], {1, 0, 0}}, {i[1], {1, 2, 2}}}) +
                       3.0 * v({{i[0], {2}}}) * v({{i[1], {2, 2}}}) +
                       12.0 * v({{i[0], {1, 1, 0}}, {i[1], {1, 1, 2}}}) +
                       6.0 * v({{i[0], {2, 1, 0}}, {i[1], {0, 1, 2}}}) +
                       4.0 * v({{i[0], {1, 1, 1}}, {i[1], {1, 1, 1}}});
            });
            t += contract(g, 3, [&](const std::vector<int>& i) {
                return 3.0 * v({{i[0], {1}}, {i[1], {1}}}) * v({{i[2], {2, 2}}}) +
                       12.0 * v({{i[0], {1, 0, 0}}, {i[1], {0, 1, 0}}, {i[2], {1, 1, 2}}}) +
                       12.0 * v({{i[0], {1, 0}}, {i[2], {1, 2}}}) * v({{i[1], {2}}}) +
                       24.0 * v({{i[0], {1, 0, 0}}, {i[1], {1, 1, 0}}, {i[2], {0, 1, 2}}}) +
                       24.0 * v({{i[0], {1, 0, 0}}, {i[1], {0, 1, 1}}, {i[2], {1, 1, 1}}}) +
                       v({{i[0], {2}}}) * v({{i[1], {2}}}) * v({{i[2], {2}}}) +
                       6.0 * v({{i[0], {2}}}) * v({{i[1], {1, 1}}, {i[2], {1, 1}}}) +
                       8.0 * v({{i[0], {1, 1, 0}}, {i[1], {0, 1, 1}}, {i[2], {1, 0, 1}}});
            });
            t += contract(g, 4, [&](const std::vector<int>& i) {
                return 12.0 * v({{i[0], {2, 1}}, {i[1], {0, 1}}}) * v({{i[2], {1}}, {i[3], {1}}}) +
                       8.0 * v({{i[0], {1, 1, 1}},
                                {i[1], {1, 0, 0}},
                                {i[2], {0, 1, 0}},
                                {i[3], {0, 0, 1}}}) +
                       3.0 * (v({{i[0], {1}}, {i[1], {1}}}) * v({{i[2], {2}}}) * v({{i[3], {2}}}) +
                              2.0 * v({{i[0], {1}}, {i[1], {1}}}) *
                                  v({{i[2], {1, 1}}, {i[3], {1, 1}}}) +
                              4.0 * v({{i[0], {1, 0}}, {i[1], {0, 1}}, {i[2], {1, 1}}}) *
                                  v({{i[3], {2}}}) +
                              8.0 * v({{i[0], {1, 0, 0}},
                                       {i[1], {0, 1, 0}},
                                       {i[2], {1, 0, 1}},
                                       {i[3], {0, 1, 1}}}));
            });
            t += contract(g, 5, [&](const std::vector<int>& i) {
                return 3.0 * (v({{i[0], {2}}}) * v({{i[1], {1}}, {i[2], {1}}}) *
                                  v({{i[3], {1}}, {i[4], {1}}}) +
                              v({{i[0], {1, 1}}, {i[1], {1, 0}}, {i[2], {0, 1}}}) *
                                  v({{i[3], {1}}, {i[4], {1}}}));
            });
            t += contract(g, 6, [&](const std::vector<int>& i) {
                return v({{i[0], {1}}, {i[1], {1}}}) * v({{i[2], {1}}, {i[3], {1}}}) *
                       v({{i[4], {1}}, {i[5], {1}}});
            });
            return t;
        }
    }
    throw std::invalid_argument("unknown bundle pattern");
}

SDerivativeMoments::Generator central_moment_smoments(std::vector<int> orders, MomentSet m) {
    return [orders = std::move(orders), m = std::move(m)](
               const std::vector<SDerivativeMoments::Factor>& factors) -> std::optional<double> {
        HPoly prod = HPoly::constant(1.0);
        for (const auto& f : factors) {
            if (f.index < 1 || f.index > static_cast<int>(orders.size())) return std::nullopt;
            int r = orders[static_cast<size_t>(f.index - 1)];
            int args = 0;
            for (int c : f.arg) args += c;
            HPoly term;
            if (r == 1) {
                // the mean: first derivative is the centered variable, higher vanish
                if (args == 1) {
                    for (size_t v = 0; v < f.arg.size(); ++v)
                        if (f.arg[v] == 1) term = HPoly::var(static_cast<int>(v));
                }
            } else {
                term = mu_r_derivative_poly(r, f.arg, m);
            }
            prod = prod * term;
            if (prod.empty()) return 0.0;
        }
        return prod.integrate(m);
    };
}

}  // namespace lowbias
