#include "lowbias/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "lowbias/errors.hpp"
#include "lowbias/hpoly.hpp"

namespace lowbias {

namespace {

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

const Eigen::MatrixXd& req(const std::optional<Eigen::MatrixXd>& m, const char* name) {
    if (!m) throw unavailable_error(name);
    return *m;
}

}  // namespace

Eigen::MatrixXd cov_first_order(const CovarianceBundle& b, double n) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    return b.taa / n;
}

Eigen::MatrixXd cov_kernel_bias(const CovarianceBundle& b) {
    // C_1 of the kernel functional T(a,a): the paired sums double into
    // the symmetrized matrices
    return 2.0 * sym(req(b.ta2a, "T(a^2,a)")) + sym(req(b.ta2bb, "T(a^2 b,b)")) +
           req(b.tabab, "T(ab,ab)") - b.taa;
}

Eigen::MatrixXd cov_second_order(const CovarianceBundle& b, double n, bool corrected,
                                 bool prefer_power_weights) {
    if (n < 2) throw std::invalid_argument("need n >= 2");
    const Eigen::MatrixXd& tabab = req(b.tabab, "T(ab,ab)");
    if (corrected) {
        // target: n^-1 taa + n^-2 tabab/2; the kernel bias is removed so
        // the realized estimate keeps the O(n^-3) error
        return b.taa / n + (0.5 * tabab - cov_kernel_bias(b)) / (n * n);
    }
    const Eigen::MatrixXd& ta2a = req(b.ta2a, "T(a^2,a)");
    double first = prefer_power_weights ? (1.0 / n + 1.0 / (n * n)) : 1.0 / (n - 1.0);
    return first * b.taa - (2.0 * sym(ta2a) + tabab) / (2.0 * n * n);
}

Eigen::MatrixXd delta_correction(const CovarianceBundle& b) {
    return -(2.0 * sym(req(b.ta2a, "T(a^2,a)")) + 2.0 * sym(req(b.ta2bb, "T(a^2 b,b)"))) / 2.0;
}

CovarianceBundle mean_function_cov_bundle(const std::vector<PartialDerivativeTable>& g,
                                          const JointMomentSet& jm) {
    int q = static_cast<int>(g.size());
    if (q < 1) throw std::invalid_argument("need at least one component");
    int s = jm.dim();
    for (const PartialDerivativeTable& t : g)
        if (t.slots() != s) throw std::invalid_argument("derivative slots must match dimension");

    CovarianceBundle out;
    out.taa.resize(q, q);
    Eigen::MatrixXd tabab(q, q), ta2a(q, q), ta2bb(q, q);
    for (int a = 0; a < q; ++a)
        for (int c = 0; c < q; ++c) {
            double acc1 = 0, acc2 = 0, acc3 = 0, acc4 = 0;
            for (int i = 1; i <= s; ++i)
                for (int j = 1; j <= s; ++j) {
                    acc1 += g[a].get({i}) * g[c].get({j}) * jm.mu({i, j});
                    for (int k = 1; k <= s; ++k) {
                        acc3 += g[a].get({i, j}) * g[c].get({k}) * jm.mu({i, j, k});
                        for (int l = 1; l <= s; ++l) {
                            acc2 += g[a].get({i, j}) * g[c].get({k, l}) * jm.mu({i, k}) *
                                    jm.mu({j, l});
                            acc4 += g[a].get({i, j, k}) * g[c].get({l}) * jm.mu({i, j}) *
                                    jm.mu({k, l});
                        }
                    }
                }
            out.taa(a, c) = acc1;
            tabab(a, c) = acc2;
            ta2a(a, c) = acc3;
            ta2bb(a, c) = acc4;
        }
    out.tabab = std::move(tabab);
    out.ta2a = std::move(ta2a);
    out.ta2bb = std::move(ta2bb);
    return out;
}

namespace {

HPoly stat_derivative(int order, std::span<const int> mult, const MomentSet& m) {
    int args = 0;
    for (int c : mult) args += c;
    if (order == 1) {
        if (args != 1) return HPoly();
        for (size_t v = 0; v < mult.size(); ++v)
            if (mult[v] == 1) return HPoly::var(static_cast<int>(v));
        return HPoly();
    }
    return mu_r_derivative_poly(order, mult, m);
}

}  // namespace

CovarianceBundle central_moment_cov_bundle(const std::vector<int>& orders, const MomentSet& m) {
    int q = static_cast<int>(orders.size());
    if (q < 1) throw std::invalid_argument("need at least one component");
    CovarianceBundle out;
    out.taa.resize(q, q);
    Eigen::MatrixXd tabab(q, q), ta2a(q, q), ta2bb(q, q);
    int x1[] = {1};
    int x2[] = {2};
    int xy11[] = {1, 1};
    int xxy[] = {2, 1};
    int y01[] = {0, 1};
    for (int a = 0; a < q; ++a)
        for (int c = 0; c < q; ++c) {
            int ra = orders[static_cast<size_t>(a)], rc = orders[static_cast<size_t>(c)];
            out.taa(a, c) = (stat_derivative(ra, x1, m) * stat_derivative(rc, x1, m)).integrate(m);
            tabab(a, c) =
                (stat_derivative(ra, xy11, m) * stat_derivative(rc, xy11, m)).integrate(m);
            ta2a(a, c) = (stat_derivative(ra, x2, m) * stat_derivative(rc, x1, m)).integrate(m);
            ta2bb(a, c) = (stat_derivative(ra, xxy, m) * stat_derivative(rc, y01, m)).integrate(m);
        }
    out.tabab = std::move(tabab);
    out.ta2a = std::move(ta2a);
    out.ta2bb = std::move(ta2bb);
    return out;
}

CovarianceBundle power_of_mean_cov_bundle(double p, const MomentSet& m) {
    double mu = m.mean();
    auto cp = [&](double coef, double expo) {
        return coef == 0.0 ? 0.0 : coef * std::pow(mu, expo);
    };
    CovarianceBundle out;
    out.taa = Eigen::MatrixXd::Constant(1, 1, cp(p * p, 2 * p - 2) * m.mu(2));
    out.tabab = Eigen::MatrixXd::Constant(
        1, 1, cp(p * p * (p - 1) * (p - 1), 2 * p - 4) * m.mu(2) * m.mu(2));
    out.ta2a = Eigen::MatrixXd::Constant(1, 1, cp(p * p * (p - 1), 2 * p - 3) * m.mu(3));
    out.ta2bb = Eigen::MatrixXd::Constant(
        1, 1, cp(p * (p - 1) * (p - 2) * p, 2 * p - 4) * m.mu(2) * m.mu(2));
    return out;
}

double mu_inverse_variance_reference(double mean_hat, double mu2_hat, double n) {
    if (mean_hat == 0.0) throw degenerate_error("zero mean");
    double s2 = n * mu2_hat / (n - 1.0);
    return s2 / (n * std::pow(mean_hat, 4)) -
           6.0 * s2 * s2 / (n * n * std::pow(mean_hat, 6));
}

Eigen::MatrixXd bias_influence_variance(const std::vector<int>& orders, const MomentSet& m) {
    int q = static_cast<int>(orders.size());
    Eigen::MatrixXd v(q, q);
    int x2[] = {2};
    int xxy[] = {2, 1};
    int yy01[] = {0, 2};
    int xxz[] = {2, 0, 1};
    int yyz[] = {0, 2, 1};
    for (int a = 0; a < q; ++a)
        for (int c = 0; c < q; ++c) {
            int ra = orders[static_cast<size_t>(a)], rc = orders[static_cast<size_t>(c)];
            double term1 =
                (stat_derivative(ra, x2, m) * stat_derivative(rc, x2, m)).integrate(m);
            double ba = stat_derivative(ra, x2, m).integrate(m);
            double bc = stat_derivative(rc, x2, m).integrate(m);
            double cross_ac =
                (stat_derivative(ra, xxy, m) * stat_derivative(rc, yy01, m)).integrate(m);
            double cross_ca =
                (stat_derivative(rc, xxy, m) * stat_derivative(ra, yy01, m)).integrate(m);
            double term4 =
                (stat_derivative(ra, xxz, m) * stat_derivative(rc, yyz, m)).integrate(m);
            v(a, c) = term1 - ba * bc + cross_ac + cross_ca + term4;
        }
    return v;
}

Eigen::MatrixXd bias_influence_variance(const std::vector<PartialDerivativeTable>& g,
                                        const JointMomentSet& jm) {
    int q = static_cast<int>(g.size());
    int s = jm.dim();
    Eigen::MatrixXd v(q, q);
    for (int a = 0; a < q; ++a)
        for (int c = 0; c < q; ++c) {
            double term1 = 0, ba = 0, bc = 0, cross_ac = 0, cross_ca = 0, term4 = 0;
            for (int i = 1; i <= s; ++i)
                for (int j = 1; j <= s; ++j) {
                    ba += g[a].get({i, j}) * jm.mu({i, j});
                    bc += g[c].get({i, j}) * jm.mu({i, j});
                    for (int k = 1; k <= s; ++k)
                        for (int l = 1; l <= s; ++l)
                            term1 += g[a].get({i, j}) * g[c].get({k, l}) * jm.mu({i, j, k, l});
                }
            for (int i = 1; i <= s; ++i)
                for (int j = 1; j <= s; ++j)
                    for (int k = 1; k <= s; ++k)
                        for (int l = 1; l <= s; ++l) {
                            for (int mm = 1; mm <= s; ++mm) {
                                cross_ac += g[a].get({i, j, k}) * g[c].get({l, mm}) *
                                            jm.mu({i, j}) * jm.mu({k, l, mm});
                                cross_ca += g[c].get({i, j, k}) * g[a].get({l, mm}) *
                                            jm.mu({i, j}) * jm.mu({k, l, mm});
                                for (int nn = 1; nn <= s; ++nn)
                                    term4 += g[a].get({i, j, k}) * g[c].get({l, mm, nn}) *
                                             jm.mu({i, j}) * jm.mu({l, mm}) * jm.mu({k, nn});
                            }
                        }
            v(a, c) = term1 - ba * bc + cross_ac + cross_ca + term4;
        }
    return v;
}

Eigen::MatrixXd bias_estimate_cov(const Eigen::MatrixXd& influence_variance, double n) {
    if (n < 2) throw std::invalid_argument("need n >= 2");
    return influence_variance / (4.0 * n * n * n);
}

}  // namespace lowbias
