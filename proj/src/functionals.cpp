#include "lowbias/functionals.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "lowbias/derivatives.hpp"
#include "lowbias/errors.hpp"

namespace lowbias {

namespace {

// iterate index tuples in {1..s}^k
template <typename Fn>
void for_tuples(int s, int k, Fn fn) {
    std::vector<int> idx(static_cast<size_t>(k), 1);
    while (true) {
        fn(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == s) {
            idx[static_cast<size_t>(pos)] = 1;
            --pos;
        }
        if (pos < 0) break;
        ++idx[static_cast<size_t>(pos)];
    }
}

// coefficient times a power, with a vanishing coefficient short-circuiting
// the power so that 0 * inf never appears
double cpow(double coef, double base, double expo) {
    if (coef == 0.0) return 0.0;
    return coef * std::pow(base, expo);
}

}  // namespace

DerivativeBundle mean_function_bundle(const PartialDerivativeTable& g,
                                      const JointMomentSet& jm) {
    int s = g.slots();
    if (s != jm.dim()) throw std::invalid_argument("derivative slots must match dimension");
    DerivativeBundle b;

    auto contract_single = [&](int k) {
        double acc = 0.0;
        for_tuples(s, k, [&](const std::vector<int>& idx) {
            double gv = g.get(idx);
            if (gv != 0.0) acc += gv * jm.mu(idx);
        });
        return acc;
    };

    if (g.has_order(2)) b.t2 = contract_single(2);
    if (g.has_order(3)) b.t3 = contract_single(3);
    if (g.has_order(4)) {
        b.t4 = contract_single(4);
        double acc = 0.0;
        for_tuples(s, 4, [&](const std::vector<int>& idx) {
            double gv = g.get(idx);
            if (gv != 0.0)
                acc += gv * jm.mu({idx[0], idx[1]}) * jm.mu({idx[2], idx[3]});
        });
        b.t22 = acc;
    }
    if (g.has_order(5)) {
        double acc = 0.0;
        for_tuples(s, 5, [&](const std::vector<int>& idx) {
            double gv = g.get(idx);
            if (gv != 0.0)
                acc += gv * jm.mu({idx[0], idx[1]}) * jm.mu({idx[2], idx[3], idx[4]});
        });
        b.t23 = acc;
    }
    if (g.has_order(6)) {
        double acc = 0.0;
        for_tuples(s, 6, [&](const std::vector<int>& idx) {
            double gv = g.get(idx);
            if (gv != 0.0)
                acc += gv * jm.mu({idx[0], idx[1]}) * jm.mu({idx[2], idx[3]}) *
                       jm.mu({idx[4], idx[5]});
        });
        b.t222 = acc;
    }
    return b;
}

LinearRatio linear_ratio(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                         const JointMomentSet& jm) {
    int s = jm.dim();
    if (alpha.size() != s || beta.size() != s)
        throw std::invalid_argument("coefficient vectors must match dimension");
    double numer = alpha.dot(jm.mean());
    double denom = beta.dot(jm.mean());
    double scale = std::max(1.0, std::abs(alpha.dot(jm.mean())));
    if (std::abs(denom) < 1e-12 * scale) throw degenerate_error("ratio denominator beta'mean");

    LinearRatio out;
    out.value = numer / denom;
    Eigen::VectorXd delta = alpha - out.value * beta;

    // contractions of delta and beta against the joint central moments
    auto mu2 = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        double acc = 0.0;
        for (int i = 1; i <= s; ++i)
            for (int j = 1; j <= s; ++j) acc += x[i - 1] * y[j - 1] * jm.mu({i, j});
        return acc;
    };
    auto mu3 = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
        double acc = 0.0;
        for (int i = 1; i <= s; ++i)
            for (int j = 1; j <= s; ++j)
                for (int k = 1; k <= s; ++k)
                    acc += x[i - 1] * y[j - 1] * z[k - 1] * jm.mu({i, j, k});
        return acc;
    };
    auto mu4 = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                   const Eigen::VectorXd& w) {
        double acc = 0.0;
        for (int i = 1; i <= s; ++i)
            for (int j = 1; j <= s; ++j)
                for (int k = 1; k <= s; ++k)
                    for (int l = 1; l <= s; ++l)
                        acc += x[i - 1] * y[j - 1] * z[k - 1] * w[l - 1] * jm.mu({i, j, k, l});
        return acc;
    };

    double db = mu2(delta, beta);
    double bb = mu2(beta, beta);
    double dbb = mu3(delta, beta, beta);
    double bbb = mu3(beta, beta, beta);
    double dbbb = mu4(delta, beta, beta, beta);

    DerivativeBundle& b = out.bundle;
    b.t2 = -2.0 / (denom * denom) * db;
    b.t3 = 6.0 * std::pow(denom, -3) * dbb;
    b.t4 = -24.0 * std::pow(denom, -4) * dbbb;
    b.t22 = -24.0 * std::pow(denom, -4) * db * bb;
    b.t23 = 24.0 * std::pow(denom, -5) * (2.0 * db * bbb + 3.0 * bb * dbb);
    b.t222 = -720.0 * std::pow(denom, -6) * db * bb * bb;

    out.t_series = corrections_one_sample(out.value, b);
    out.s_series = simpler_one_sample(out.value, b);
    return out;
}

PowerOfMean power_of_mean(double p, const MomentSet& m) {
    bool integer_exponent = std::floor(p) == p;
    if (!integer_exponent || p < 0) {
        if (m.mean() == 0.0) throw degenerate_error("mean is zero for a non-polynomial power");
        if (!integer_exponent && m.mean() < 0.0)
            throw degenerate_error("negative mean with a non-integer power");
    }
    PowerOfMean out;
    double mu = m.mean();
    out.value = std::pow(mu, p);

    auto ff = [&](int k) { return falling_factorial(p, k); };
    double s1 = -cpow(ff(2), mu, p - 2) * m.mu(2) / 2.0;
    double s2 = cpow(ff(3), mu, p - 3) * m.mu(3) / 3.0 + cpow(ff(4), mu, p - 4) * m.mu(2) * m.mu(2) / 8.0;
    double s3 = -cpow(ff(4), mu, p - 4) * (2.0 * m.mu(4) - 3.0 * m.mu(2) * m.mu(2)) / 8.0 -
                cpow(ff(5), mu, p - 5) * m.mu(3) * m.mu(2) / 6.0 -
                cpow(ff(6), mu, p - 6) * std::pow(m.mu(2), 3) / 48.0;

    out.s_series.base = out.value;
    out.s_series.scheme = WeightScheme::FallingFactorial;
    out.s_series.terms = {s1, s2, s3};

    double t2 = s1 + s2;
    double t3 = s1 + cpow(ff(3), mu, p - 3) * m.mu(3) -
                cpow(ff(4), mu, p - 4) * (m.mu(4) - 3.0 * m.mu(2) * m.mu(2)) / 4.0 -
                cpow(ff(5), mu, p - 5) * m.mu(3) * m.mu(2) / 6.0 -
                cpow(ff(6), mu, p - 6) * std::pow(m.mu(2), 3) / 48.0;
    out.t_series.base = out.value;
    out.t_series.scheme = WeightScheme::PowerOfN;
    out.t_series.terms = {s1, t2, t3};

    if (out.value != 0.0)
        out.normalized = std::array<double, 3>{s1 / out.value, s2 / out.value, s3 / out.value};
    return out;
}

DerivativeBundle power_of_mean_bundle(double p, const MomentSet& m) {
    double mu = m.mean();
    auto ff = [&](int k) { return falling_factorial(p, k); };
    DerivativeBundle b;
    b.t2 = cpow(ff(2), mu, p - 2) * m.mu(2);
    b.t3 = cpow(ff(3), mu, p - 3) * m.mu(3);
    b.t4 = cpow(ff(4), mu, p - 4) * m.mu(4);
    b.t22 = cpow(ff(4), mu, p - 4) * m.mu(2) * m.mu(2);
    b.t23 = cpow(ff(5), mu, p - 5) * m.mu(2) * m.mu(3);
    b.t222 = cpow(ff(6), mu, p - 6) * std::pow(m.mu(2), 3);
    return b;
}

MultiBundle means_of_k_samples_bundle(const PartialDerivativeTable& g,
                                      const std::vector<MomentSet>& per_sample) {
    int k = static_cast<int>(per_sample.size());
    if (g.slots() != k) throw std::invalid_argument("derivative slots must match sample count");
    MultiBundle out(k);

    auto value = [&](const MultiBundle::Blocks& blocks) {
        std::vector<int> gidx;
        double mus = 1.0;
        for (const auto& [tag, power] : blocks) {
            for (int c = 0; c < power; ++c) gidx.push_back(tag + 1);
            mus *= per_sample[static_cast<size_t>(tag)].mu(power);
        }
        double gv = g.get(gidx);
        return gv == 0.0 ? 0.0 : gv * mus;
    };

    for (int a = 0; a < k; ++a) {
        if (g.has_order(2)) out.set({{a, 2}}, value({{a, 2}}));
        if (g.has_order(3)) out.set({{a, 3}}, value({{a, 3}}));
        if (g.has_order(4)) out.set({{a, 4}}, value({{a, 4}}));
    }
    if (g.has_order(4))
        for (int a = 0; a < k; ++a)
            for (int c = a; c < k; ++c) out.set({{a, 2}, {c, 2}}, value({{a, 2}, {c, 2}}));
    if (g.has_order(5))
        for (int a = 0; a < k; ++a)
            for (int c = 0; c < k; ++c) out.set({{a, 2}, {c, 3}}, value({{a, 2}, {c, 3}}));
    if (g.has_order(6))
        for (int a = 0; a < k; ++a)
            for (int c = a; c < k; ++c)
                for (int e = c; e < k; ++e)
                    out.set({{a, 2}, {c, 2}, {e, 2}}, value({{a, 2}, {c, 2}, {e, 2}}));
    return out;
}

TwoSampleRatio ratio_of_two_means(const MomentSet& m1, const MomentSet& m2, double lambda2) {
    if (std::abs(m2.mean()) < 1e-12 * std::max(1.0, std::abs(m1.mean())))
        throw degenerate_error("denominator mean is zero");
    TwoSampleRatio out;
    double ratio = m1.mean() / m2.mean();
    out.value = ratio;
    auto nu = [&](int r) { return m2.mu(r) * std::pow(m2.mean(), -r); };
    double n2 = nu(2), n3 = nu(3), n4 = nu(4);
    double l = lambda2;

    out.coeffs.c1 = l * n2 * ratio;
    out.coeffs.c2 = l * l * (-n3 + 3.0 * n2 * n2) * ratio;
    out.coeffs.c3 =
        l * l * l * (n4 - 3.0 * n2 * n2 - 10.0 * n2 * n3 + 15.0 * std::pow(n2, 3)) * ratio;

    double t1 = -l * n2 * ratio;
    double t2 = l * l * (-2.0 * n3 - n2 + 3.0 * n2 * n2) * ratio;
    double t3 = l * l * l *
                (-6.0 * n4 - 6.0 * n3 - n2 - 15.0 * std::pow(n2, 3) + 20.0 * n3 * n2 +
                 18.0 * n2 * n2) *
                ratio;
    out.t_series = {ratio, {t1, t2, t3}, WeightScheme::PowerOfN, {}};
    out.s_series = {ratio,
                    {t1, t2 - t1, t3 - 3.0 * t2 + 2.0 * t1},
                    WeightScheme::FallingFactorial,
                    {}};
    return out;
}

CentralMomentFunctional central_moment(int r, const MomentSet& m) {
    if (r < 2 || r > 8) throw std::invalid_argument("central-moment corrections cover 2 <= r <= 8");
    CentralMomentFunctional out;
    out.order = r;
    out.value = m.mu(r);

    auto br = [&](std::initializer_list<int> part) {
        std::vector<int> p(part);
        return mu_r_bracket(r, p, m);
    };
    DerivativeBundle& b = out.bundle;
    b.t2 = br({2});
    b.t3 = br({3});
    b.t4 = br({4});
    b.t22 = br({2, 2});
    b.t23 = br({2, 3});
    b.t222 = br({2, 2, 2});
    b.t5 = br({5});
    b.t24 = br({2, 4});
    b.t33 = br({3, 3});
    b.t223 = br({2, 2, 3});
    b.t2222 = br({2, 2, 2, 2});

    out.coeffs = bias_coeffs_one_sample(b, true);
    out.t_series = corrections_one_sample(out.value, b);
    out.s_series = simpler_one_sample(out.value, b);

    if (r <= 7) {
        int s = r / 2;
        std::vector<double> t_terms;
        t_terms.push_back(out.value);
        for (int i = 1; i <= s; ++i) t_terms.push_back(out.t_series.terms[static_cast<size_t>(i - 1)]);
        out.ue_numerator = polynomial_ue_coefficients(t_terms, r);
    }
    return out;
}

double CentralMomentFunctional::unbiased(double n) const {
    if (ue_numerator.empty()) throw unavailable_error("unbiased form for r > 7");
    return polynomial_ue_evaluate(ue_numerator, order, n);
}

DerivativeBundle moment_product_bundle(const std::map<int, double>& exponents,
                                       const MomentSet& m) {
    std::vector<int> js;
    std::vector<double> ps;
    double t_value = 1.0;
    for (const auto& [j, pj] : exponents) {
        if (j < 2) throw std::invalid_argument("product indices start at mu_2");
        if (pj == 0.0) continue;
        if (m.mu(j) == 0.0) throw degenerate_error("mu_" + std::to_string(j) + " vanishes");
        js.push_back(j);
        ps.push_back(pj);
        t_value *= std::pow(m.mu(j), pj);
    }
    if (js.empty()) throw std::invalid_argument("empty moment product");
    size_t q = js.size();
    auto mu = [&](size_t a) { return m.mu(js[a]); };
    auto d = [&](size_t a, size_t b) { return a == b ? 1.0 : 0.0; };

    DerivativeBundle out;
    {
        double acc = 0.0;
        for (size_t i = 0; i < q; ++i) {
            for (size_t j = i + 1; j < q; ++j)
                acc += 2.0 * ps[i] * ps[j] * bracket_pair(js[i], js[j], m) / (mu(i) * mu(j));
            acc += ps[i] * (ps[i] - 1.0) * bracket_pair(js[i], js[i], m) / (mu(i) * mu(i));
            int p2[] = {2};
            acc += ps[i] * mu_r_bracket(js[i], p2, m) / mu(i);
        }
        out.t2 = t_value * acc;
    }
    {
        double acc = 0.0;
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < q; ++j)
                for (size_t k = 0; k < q; ++k)
                    acc += ps[i] * (ps[j] - d(i, j)) * (ps[k] - d(i, k) - d(j, k)) *
                           bracket_triple(js[i], js[j], js[k], m) / (mu(i) * mu(j) * mu(k));
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < q; ++j)
                acc += 3.0 * ps[i] * (ps[j] - d(i, j)) * bracket_21(js[i], js[j], m) /
                       (mu(i) * mu(j));
        for (size_t i = 0; i < q; ++i) {
            int p3[] = {3};
            acc += ps[i] * mu_r_bracket(js[i], p3, m) / mu(i);
        }
        out.t3 = t_value * acc;
    }
    {
        double acc = 0.0;
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < q; ++j)
                for (size_t k = 0; k < q; ++k)
                    for (size_t l = 0; l < q; ++l)
                        acc += ps[i] * (ps[j] - d(i, j)) * (ps[k] - d(i, k) - d(j, k)) *
                               (ps[l] - d(i, l) - d(j, l) - d(k, l)) * bracket_pair(js[i], js[j], m) *
                               bracket_pair(js[k], js[l], m) / (mu(i) * mu(j) * mu(k) * mu(l));
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < q; ++j)
                for (size_t k = 0; k < q; ++k)
                    acc += ps[i] * (ps[j] - d(i, j)) * (ps[k] - d(i, k) - d(j, k)) *
                           bracket_g(js[i], js[j], js[k], m) / (mu(i) * mu(j) * mu(k));
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < q; ++j)
                acc += ps[i] * (ps[j] - d(i, j)) * bracket_h(js[i], js[j], m) / (mu(i) * mu(j));
        for (size_t i = 0; i < q; ++i) {
            int p22[] = {2, 2};
            acc += ps[i] * mu_r_bracket(js[i], p22, m) / mu(i);
        }
        out.t22 = t_value * acc;
    }
    return out;
}

DerivativeBundle mu_r_pow_bundle(int r, double p, const MomentSet& m) {
    return moment_product_bundle({{r, p}}, m);
}

DerivativeBundle mu2_pow_bundle(double q, const MomentSet& m) {
    if (m.mu(2) <= 0.0) throw degenerate_error("mu_2 must be positive");
    double t = std::pow(m.mu(2), q);
    double b3 = m.beta(3), b4 = m.beta(4), b5 = m.beta(5), b6 = m.beta(6), b8 = m.beta(8);
    auto ff = [&](int k) { return falling_factorial(q, k); };

    DerivativeBundle b;
    b.t2 = t * (ff(2) * (b4 - 1) - 2.0 * q);
    b.t3 = t * (ff(3) * (b6 - 3 * b4 + 2) - 6.0 * ff(2) * (b4 - 1));
    b.t4 = t * (ff(4) * (b8 - 4 * b6 + 6 * b4 - 3) - 12.0 * ff(3) * (b6 - 2 * b4 + 1) +
                12.0 * ff(2) * b4);
    b.t22 = t * (ff(4) * (b4 - 1) * (b4 - 1) - 4.0 * ff(3) * (b4 - 1 + 2 * b3 * b3) +
                 12.0 * ff(2));
    b.t23 = t * (12.0 * ff(3) * (2 * b3 * b3 + 3 * b4 - 3) -
                 2.0 * ff(4) * (b6 - 3 * b4 + 2 + 6 * b3 * (b5 - 2 * b3) + 3 * (b4 - 1) * (b4 - 1)) +
                 ff(5) * (b4 - 1) * (b6 - 3 * b4 + 2));
    b.t222 = t * (-120.0 * ff(3) + 36.0 * ff(4) * (b4 - 1 + 4 * b3 * b3) -
                  6.0 * ff(5) * (b4 - 1 + b3 * b3) * (b4 - 1) + ff(6) * std::pow(b4 - 1, 3));
    return b;
}

SdFunctional sd_functional(const MomentSet& m) {
    if (m.mu(2) <= 0.0) throw degenerate_error("mu_2 must be positive");
    SdFunctional out;
    out.value = m.sd();
    DerivativeBundle b = mu2_pow_bundle(0.5, m);
    out.t_series = corrections_one_sample(out.value, b);
    out.s_series = simpler_one_sample(out.value, b);
    out.s1 = out.s_series.terms[0] / out.value;
    out.s2 = out.s_series.terms[1] / out.value;
    out.s3 = out.s_series.terms[2] / out.value;
    double b4 = m.beta(4);
    out.lambda1 = (b4 - 1.0) / (b4 + 3.0);
    out.lambda2 = out.s2 / (out.s1 - 0.5);
    return out;
}

MeanOverSd mean_over_sd(const MomentSet& m) {
    if (m.mu(2) <= 0.0) throw degenerate_error("mu_2 must be positive");
    MeanOverSd out;
    double mu = m.mean(), v = m.mu(2);
    out.value = mu / std::sqrt(v);

    PartialDerivativeTable g(2);
    g.set({1}, std::pow(v, -0.5));
    g.set({2}, -0.5 * mu * std::pow(v, -1.5));
    g.provide_order(2);
    g.set({1, 2}, -0.5 * std::pow(v, -1.5));
    g.set({2, 2}, 0.75 * mu * std::pow(v, -2.5));
    g.provide_order(3);
    g.set({1, 2, 2}, 0.75 * std::pow(v, -2.5));
    g.set({2, 2, 2}, -1.875 * mu * std::pow(v, -3.5));
    g.provide_order(4);
    g.set({1, 2, 2, 2}, -1.875 * std::pow(v, -3.5));
    g.set({2, 2, 2, 2}, 6.5625 * mu * std::pow(v, -4.5));

    SDerivativeMoments s(2, central_moment_smoments({1, 2}, m));
    double t2 = chain_bundle(g, s, BundlePattern::A2);
    double t3 = chain_bundle(g, s, BundlePattern::A3);
    double t22 = chain_bundle(g, s, BundlePattern::A2B2);

    out.s1 = -t2 / 2.0;
    out.s2 = t3 / 3.0 + t22 / 8.0;
    out.s_series = {out.value, {out.s1, out.s2}, WeightScheme::FallingFactorial, {}};
    return out;
}

CorrectionSeries return_period_series(double p_hat) {
    if (p_hat <= 0.0) throw degenerate_error("event probability is zero");
    double p1 = 1.0 / p_hat;
    CorrectionSeries s;
    s.base = p1;
    s.scheme = WeightScheme::FallingFactorial;
    s.terms = {
        p1 - p1 * p1,
        -p1 + p1 * p1 * p1,
        2.0 * p1 + p1 * p1 - 2.0 * std::pow(p1, 3) - std::pow(p1, 4),
    };
    return s;
}

double return_period_estimate(double p_hat, double n, int p, double lower_bound) {
    if (!(lower_bound > 0.0 && lower_bound < 1.0))
        throw std::invalid_argument("probability bound must lie in (0,1)");
    if (p_hat <= lower_bound) return 1.0 / lower_bound;
    return assemble_estimate(return_period_series(p_hat), n, p);
}

ConditionalMeanEstimate conditional_mean(
    const Sample& s, const std::function<bool(const Eigen::VectorXd&)>& region,
    const std::function<double(const Eigen::VectorXd&)>& payoff, double constant) {
    double n = static_cast<double>(s.size());
    if (n < 4) throw std::invalid_argument("conditional mean correction needs n >= 4");
    ConditionalMeanEstimate out;
    double acc = 0.0;
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        Eigen::VectorXd row = s.data().row(i).transpose();
        if (region(row)) {
            acc += payoff(row);
            ++hits;
        }
    }
    out.mu1_hat = acc / n;
    out.p_hat = static_cast<double>(hits) / n;
    if (hits == 0) {
        out.value = constant;
        out.gated = true;
        return out;
    }
    double p = out.p_hat, q = 1.0 - p;
    double bracket = 1.0 - q * q / p / (n - 1) + std::pow(q, 3) / (p * p) / ((n - 1) * (n - 2)) +
                     std::pow(q, 3) / std::pow(p, 3) * (2.0 * p - 1.0) /
                         ((n - 1) * (n - 2) * (n - 3));
    out.value = out.mu1_hat / p * bracket;
    return out;
}

ExceedanceEstimates exceedance_estimators(const Sample& s, double u, double x, double constant) {
    if (s.dim() != 1) throw std::invalid_argument("exceedance estimators need univariate data");
    ExceedanceEstimates out;
    auto above = [u](const Eigen::VectorXd& v) { return v[0] > u; };
    out.p_exceed = empirical_probability(s, above);

    auto window = [&](const Eigen::VectorXd& v) { return (v[0] > u && v[0] < x + u) ? 1.0 : 0.0; };
    ConditionalMeanEstimate cdf = conditional_mean(s, above, window, constant);
    out.cdf_corrected = cdf.value;
    out.cdf_plugin = cdf.p_hat > 0 ? cdf.mu1_hat / cdf.p_hat : constant;

    auto excess = [&](const Eigen::VectorXd& v) { return std::max(v[0] - u, 0.0); };
    ConditionalMeanEstimate mean = conditional_mean(s, above, excess, constant);
    out.mean_corrected = mean.value;
    out.mean_plugin = mean.p_hat > 0 ? mean.mu1_hat / mean.p_hat : constant;
    return out;
}

double exceedance_first_derivative(double s_derivative_at_shifted, double p_exceed) {
    if (p_exceed <= 0.0) throw degenerate_error("no exceedances");
    return s_derivative_at_shifted / p_exceed;
}

double multivariate_moment_ue(const std::vector<int>& index, const JointMomentSet& jm, double n) {
    if (n < 3) throw std::invalid_argument("need n >= 3");
    std::vector<int> sorted = index;
    std::sort(sorted.begin(), sorted.end());
    if (sorted == std::vector<int>{1, 2}) return jm.mu({1, 2}) / (1.0 - 1.0 / n);
    if (sorted == std::vector<int>{1, 2, 3})
        return jm.mu({1, 2, 3}) / ((1.0 - 1.0 / n) * (1.0 - 2.0 / n));
    throw std::invalid_argument("supported indices are {1,2} and {1,2,3}");
}

CorrelationEstimates correlation_estimators(const JointMomentSet& jm, double n) {
    if (jm.dim() != 2) throw std::invalid_argument("correlation needs bivariate moments");
    double v11 = jm.mu({1, 1}), v22 = jm.mu({2, 2});
    if (v11 <= 0.0 || v22 <= 0.0) throw degenerate_error("marginal variance is zero");

    auto nu = [&](std::vector<int> idx) {
        double scale = 1.0;
        for (int i : idx) scale *= (i == 1 ? v11 : v22);
        return jm.mu(idx) / std::sqrt(scale);
    };
    double n12 = nu({1, 2});
    double n1111 = nu({1, 1, 1, 1}), n2222 = nu({2, 2, 2, 2}), n1122 = nu({1, 1, 2, 2});
    double n1112 = nu({1, 1, 1, 2}), n1222 = nu({1, 2, 2, 2});

    CorrelationEstimates out;
    out.rho = n12;
    out.rho_sq = n12 * n12;
    out.t2_rho = n12 * (3 * n1111 + 3 * n2222 + 2 * n1122) / 4.0 - n1112 - n1222;
    out.t2_rho_sq = 2.0 * (n1122 + n12 * n12 * (n1111 + n2222 + n1122) -
                           2.0 * n12 * (n1112 + n1222));
    out.rho_n = out.rho - out.t2_rho / (2.0 * n);
    out.rho_nm1 = out.rho - out.t2_rho / (2.0 * n - 2.0);
    out.rho_sq_n = out.rho_sq - out.t2_rho_sq / (2.0 * n);
    out.rho_sq_nm1 = out.rho_sq - out.t2_rho_sq / (2.0 * n - 2.0);
    return out;
}

CatalogEntry catalog_entry(const std::string& id) {
    std::string name = id;
    std::string arg;
    if (auto pos = id.find(':'); pos != std::string::npos) {
        name = id.substr(0, pos);
        arg = id.substr(pos + 1);
    }
    auto parse = [&](const char* what) {
        if (arg.empty()) throw std::invalid_argument(std::string(what) + " needs a parameter");
        return std::stod(arg);
    };

    CatalogEntry e;
    e.id = id;
    if (name == "mean_pow" || name == "return_period") {
        double p = (name == "return_period") ? -1.0 : parse("mean_pow");
        e.moment_order = 4;
        e.value = [p](const MomentSet& m) { return std::pow(m.mean(), p); };
        e.series_s = [p](const MomentSet& m) { return power_of_mean(p, m).s_series; };
        e.series_t = [p](const MomentSet& m) { return power_of_mean(p, m).t_series; };
        e.influence_variance = [p](const MomentSet& m) {
            return p * p * std::pow(m.mean(), 2 * p - 2) * m.mu(2);
        };
    } else if (name == "central_moment") {
        int r = static_cast<int>(parse("central_moment"));
        e.moment_order = r;
        e.value = [r](const MomentSet& m) { return m.mu(r); };
        e.series_s = [r](const MomentSet& m) { return central_moment(r, m).s_series; };
        e.series_t = [r](const MomentSet& m) { return central_moment(r, m).t_series; };
        e.influence_variance = [r](const MomentSet& m) { return bracket_pair(r, r, m); };
    } else if (name == "mu2_pow") {
        double q = parse("mu2_pow");
        e.moment_order = 8;
        e.value = [q](const MomentSet& m) { return std::pow(m.mu(2), q); };
        e.series_s = [q](const MomentSet& m) {
            return simpler_one_sample(std::pow(m.mu(2), q), mu2_pow_bundle(q, m));
        };
        e.series_t = [q](const MomentSet& m) {
            return corrections_one_sample(std::pow(m.mu(2), q), mu2_pow_bundle(q, m));
        };
        e.influence_variance = [q](const MomentSet& m) {
            return q * q * std::pow(m.mu(2), 2 * q - 2) * (m.mu(4) - m.mu(2) * m.mu(2));
        };
    } else if (name == "sd") {
        e.moment_order = 8;
        e.value = [](const MomentSet& m) { return m.sd(); };
        e.series_s = [](const MomentSet& m) { return sd_functional(m).s_series; };
        e.series_t = [](const MomentSet& m) { return sd_functional(m).t_series; };
        e.influence_variance = [](const MomentSet& m) {
            return m.mu(2) * (m.beta(4) - 1.0) / 4.0;
        };
    } else if (name == "mean_over_sd") {
        e.moment_order = 6;
        e.value = [](const MomentSet& m) { return m.mean() / m.sd(); };
        e.series_s = [](const MomentSet& m) { return mean_over_sd(m).s_series; };
        e.series_t = [](const MomentSet& m) {
            MeanOverSd f = mean_over_sd(m);
            CorrectionSeries t;
            t.base = f.value;
            t.scheme = WeightScheme::PowerOfN;
            t.terms = {f.s1, f.s2 + f.s1};
            return t;
        };
        e.influence_variance = [](const MomentSet& m) {
            double beta = m.mean() / m.sd();
            return 1.0 - beta * m.beta(3) + beta * beta * (m.beta(4) - 1.0) / 4.0;
        };
    } else {
        throw std::invalid_argument("unknown functional id: " + id);
    }
    return e;
}

}  // namespace lowbias
