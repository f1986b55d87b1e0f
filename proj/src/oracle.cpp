#include "lowbias/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lowbias {

double composition_count(int n, int atom_count) {
    // C(n + m - 1, m - 1)
    return std::round(std::exp(std::lgamma(n + atom_count) - std::lgamma(n + 1.0) -
                               std::lgamma(static_cast<double>(atom_count))));
}

namespace {

constexpr double kBudget = 1e6;

// walk all count-vectors summing to n, calling fn(counts)
template <typename Fn>
void for_compositions(int n, int m, std::vector<int>& counts, int pos, int remaining, Fn& fn) {
    if (pos == m - 1) {
        counts[static_cast<size_t>(pos)] = remaining;
        fn(counts);
        return;
    }
    for (int c = 0; c <= remaining; ++c) {
        counts[static_cast<size_t>(pos)] = c;
        for_compositions(n, m, counts, pos + 1, remaining - c, fn);
    }
}

struct Enumerator {
    const DiscreteDistribution& dist;
    int n;
    double log_n_fact;
    std::vector<double> log_p;

    explicit Enumerator(const DiscreteDistribution& d, int n_in) : dist(d), n(n_in) {
        if (n < 1) throw std::invalid_argument("need n >= 1");
        double count = composition_count(n, d.count());
        if (count > kBudget)
            throw std::invalid_argument("composition budget exceeded: " +
                                        std::to_string(static_cast<long long>(count)) +
                                        " > 1e6");
        log_n_fact = std::lgamma(n + 1.0);
        for (int i = 0; i < d.count(); ++i) log_p.push_back(std::log(d.probs[i]));
    }

    double weight(const std::vector<int>& counts) const {
        double lw = log_n_fact;
        for (size_t i = 0; i < counts.size(); ++i) {
            lw -= std::lgamma(counts[i] + 1.0);
            lw += counts[i] * log_p[i];
        }
        return std::exp(lw);
    }

    Sample expand(const std::vector<int>& counts) const {
        Eigen::MatrixXd obs(n, dist.dim());
        Eigen::Index row = 0;
        for (size_t i = 0; i < counts.size(); ++i)
            for (int c = 0; c < counts[i]; ++c)
                obs.row(row++) = dist.atoms.row(static_cast<Eigen::Index>(i));
        return Sample(std::move(obs));
    }
};

}  // namespace

double exact_expectation(const SampleStatistic& statistic, const DiscreteDistribution& dist,
                         int n) {
    Enumerator en(dist, n);
    double acc = 0.0;
    std::vector<int> counts(static_cast<size_t>(dist.count()), 0);
    auto visit = [&](const std::vector<int>& c) { acc += en.weight(c) * statistic(en.expand(c)); };
    for_compositions(n, dist.count(), counts, 0, n, visit);
    return acc;
}

double exact_expectation_two(
    const std::function<double(const Sample&, const Sample&)>& statistic,
    const DiscreteDistribution& dist1, const DiscreteDistribution& dist2, int n1, int n2) {
    Enumerator e1(dist1, n1);
    Enumerator e2(dist2, n2);
    if (composition_count(n1, dist1.count()) * composition_count(n2, dist2.count()) > kBudget)
        throw std::invalid_argument("composition budget exceeded for the sample pair");
    double acc = 0.0;
    std::vector<int> c1(static_cast<size_t>(dist1.count()), 0);
    std::vector<int> c2(static_cast<size_t>(dist2.count()), 0);
    auto outer = [&](const std::vector<int>& a) {
        double wa = e1.weight(a);
        Sample sa = e1.expand(a);
        auto inner = [&](const std::vector<int>& b) {
            acc += wa * e2.weight(b) * statistic(sa, e2.expand(b));
        };
        for_compositions(n2, dist2.count(), c2, 0, n2, inner);
    };
    for_compositions(n1, dist1.count(), c1, 0, n1, outer);
    return acc;
}

std::vector<BiasPoint> exact_bias_curve(const std::function<SampleStatistic(int)>& family,
                                        const DiscreteDistribution& dist, int n_lo, int n_hi,
                                        double truth) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad size range");
    std::vector<BiasPoint> curve;
    for (int n = n_lo; n <= n_hi; ++n)
        curve.push_back({n, exact_expectation(family(n), dist, n) - truth});
    return curve;
}

double sup_scaled_bias(const std::vector<BiasPoint>& curve, int p) {
    double sup = 0.0;
    for (const BiasPoint& pt : curve)
        sup = std::max(sup, std::abs(pt.bias) * std::pow(pt.n, p));
    return sup;
}

}  // namespace lowbias
