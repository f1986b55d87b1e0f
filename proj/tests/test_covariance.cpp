#include <cmath>
#include <random>

#include "doctest.h"
#include "lowbias/covariance.hpp"
#include "lowbias/derivatives.hpp"
#include "lowbias/errors.hpp"
#include "lowbias/functionals.hpp"
#include "lowbias/oracle.hpp"

using namespace lowbias;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

JointMomentSet random_bivariate(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> ud(-1, 1);
    Eigen::MatrixXd obs(14, 2);
    for (Eigen::Index i = 0; i < obs.rows(); ++i) {
        obs(i, 0) = 2.0 + ud(gen);
        obs(i, 1) = 3.0 + 0.4 * obs(i, 0) + ud(gen);
    }
    return joint_central_moments(Sample(obs), 4);
}

PartialDerivativeTable ratio_g(const JointMomentSet& jm) {
    double m1 = jm.mean()[0], m2 = jm.mean()[1];
    PartialDerivativeTable g(2);
    g.set({1}, 1.0 / m2);
    g.set({2}, -m1 / (m2 * m2));
    g.set({1, 2}, -1.0 / (m2 * m2));
    g.set({2, 2}, 2.0 * m1 / std::pow(m2, 3));
    g.set({1, 2, 2}, 2.0 / std::pow(m2, 3));
    g.set({2, 2, 2}, -6.0 * m1 / std::pow(m2, 4));
    g.provide_order(3);
    return g;
}

}  // namespace

TEST_CASE("first-order covariance of the mean is mu_2 / n") {
    MomentSet m(1.3, {2.1, 0.4, 11.0, 1.0, 90.0});
    CovarianceBundle b = central_moment_cov_bundle({1}, m);
    CHECK(b.taa(0, 0) == doctest::Approx(m.mu(2)));
    CHECK(cov_first_order(b, 25.0)(0, 0) == doctest::Approx(m.mu(2) / 25.0));
}

TEST_CASE("power-of-mean kernels match the printed list") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> ud(0.5, 2.0);
    MomentSet m(ud(gen) + 1.0, {ud(gen), ud(gen) - 1.0, 3.0 * ud(gen)});
    for (double p : {2.0, 3.0, -1.0}) {
        CovarianceBundle b = power_of_mean_cov_bundle(p, m);
        double mu = m.mean();
        CHECK(rel_diff(b.taa(0, 0), p * p * std::pow(mu, 2 * p - 2) * m.mu(2)) < 1e-13);
        CHECK(rel_diff((*b.tabab)(0, 0),
                       p * p * (p - 1) * (p - 1) * std::pow(mu, 2 * p - 4) * m.mu(2) * m.mu(2)) <
              1e-13);
        CHECK(rel_diff((*b.ta2a)(0, 0),
                       p * p * (p - 1) * std::pow(mu, 2 * p - 3) * m.mu(3)) < 1e-13);
        CHECK(rel_diff((*b.ta2bb)(0, 0),
                       p * (p - 1) * (p - 2) * p * std::pow(mu, 2 * p - 4) * m.mu(2) * m.mu(2)) <
              1e-13);

        // the one-dimensional mean-function route gives the same kernels
        JointMomentSet jm(Eigen::VectorXd::Constant(1, mu),
                          {{{1, 1}, m.mu(2)}, {{1, 1, 1}, m.mu(3)}, {{1, 1, 1, 1}, m.mu(4)}}, 4);
        PartialDerivativeTable g(1);
        for (int k = 1; k <= 3; ++k)
            g.set(std::vector<int>(static_cast<size_t>(k), 1),
                  falling_factorial(p, k) * std::pow(mu, p - k));
        CovarianceBundle viaMean = mean_function_cov_bundle({g}, jm);
        CHECK(rel_diff(viaMean.taa(0, 0), b.taa(0, 0)) < 1e-12);
        CHECK(rel_diff((*viaMean.tabab)(0, 0), (*b.tabab)(0, 0)) < 1e-12);
        CHECK(rel_diff((*viaMean.ta2a)(0, 0), (*b.ta2a)(0, 0)) < 1e-12);
        CHECK(rel_diff((*viaMean.ta2bb)(0, 0), (*b.ta2bb)(0, 0)) < 1e-12);
    }
}

TEST_CASE("ratio of means: first-order kernel in standardized form") {
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 10; ++rep) {
        JointMomentSet jm = random_bivariate(gen);
        double m1 = jm.mean()[0], m2 = jm.mean()[1];
        double t = m1 / m2;
        auto gamma = [&](int i, int j) {
            return jm.mu({i, j}) / (jm.mean()[i - 1] * jm.mean()[j - 1]);
        };
        CovarianceBundle b = mean_function_cov_bundle({ratio_g(jm)}, jm);
        double expect = t * t * (gamma(1, 1) - 2.0 * gamma(1, 2) + gamma(2, 2));
        CHECK(rel_diff(b.taa(0, 0), expect) < 1e-12);

        // remaining kernels against the delta contractions
        Eigen::Vector2d delta{1.0, -t}, beta{0.0, 1.0};
        auto mu2v = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
            double acc = 0;
            for (int i = 1; i <= 2; ++i)
                for (int j = 1; j <= 2; ++j) acc += x[i - 1] * y[j - 1] * jm.mu({i, j});
            return acc;
        };
        auto mu3v = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                        const Eigen::Vector2d& z) {
            double acc = 0;
            for (int i = 1; i <= 2; ++i)
                for (int j = 1; j <= 2; ++j)
                    for (int k = 1; k <= 2; ++k)
                        acc += x[i - 1] * y[j - 1] * z[k - 1] * jm.mu({i, j, k});
            return acc;
        };
        double d4 = std::pow(m2, -4), d3 = std::pow(m2, -3);
        CHECK(rel_diff((*b.tabab)(0, 0),
                       2.0 * d4 *
                           (mu2v(delta, beta) * mu2v(delta, beta) +
                            mu2v(delta, delta) * mu2v(beta, beta))) < 1e-12);
        CHECK(rel_diff((*b.ta2a)(0, 0), -2.0 * d3 * mu3v(delta, delta, beta)) < 1e-12);
        CHECK(rel_diff((*b.ta2bb)(0, 0),
                       2.0 * d4 *
                           (2.0 * mu2v(delta, beta) * mu2v(delta, beta) +
                            mu2v(delta, delta) * mu2v(beta, beta))) < 1e-12);

        // standardized forms (the delta contractions force the gamma_12^2
        // term in T(ab,ab) and the -6 coefficient in T(a^2 b, b))
        double g11 = gamma(1, 1), g12 = gamma(1, 2), g22 = gamma(2, 2);
        CHECK(rel_diff((*b.tabab)(0, 0),
                       2.0 * t * t *
                           (g12 * g12 - 4.0 * g12 * g22 + 2.0 * g22 * g22 + g11 * g22)) < 1e-12);
        CHECK(rel_diff((*b.ta2bb)(0, 0),
                       2.0 * t * t *
                           (2.0 * g12 * g12 - 6.0 * g12 * g22 + 3.0 * g22 * g22 + g11 * g22)) <
              1e-12);
    }
}

TEST_CASE("linear component kills the second-order kernels") {
    std::mt19937_64 gen(9);
    JointMomentSet jm = random_bivariate(gen);
    PartialDerivativeTable lin(2);
    lin.set({1}, 1.0);
    lin.set({2}, 2.0);
    lin.provide_order(2);
    lin.provide_order(3);
    CovarianceBundle b = mean_function_cov_bundle({lin}, jm);
    CHECK((*b.tabab)(0, 0) == 0.0);
    CHECK((*b.ta2a)(0, 0) == 0.0);
    CHECK((*b.ta2bb)(0, 0) == 0.0);
    double n = 30.0;
    CHECK(cov_second_order(b, n, false)(0, 0) == doctest::Approx(b.taa(0, 0) / (n - 1.0)));
}

TEST_CASE("variance kernels and the kernel bias coefficient") {
    MomentSet m(0.7, {1.4, 0.6, 6.2, 2.0, 55.0});
    CovarianceBundle b = central_moment_cov_bundle({2}, m);
    double mu2 = m.mu(2), mu4 = m.mu(4);
    CHECK(b.taa(0, 0) == doctest::Approx(mu4 - mu2 * mu2));
    CHECK((*b.tabab)(0, 0) == doctest::Approx(4.0 * mu2 * mu2));
    CHECK((*b.ta2a)(0, 0) == doctest::Approx(-2.0 * (mu4 - mu2 * mu2)));
    CHECK((*b.ta2bb)(0, 0) == doctest::Approx(0.0));
    // first bias coefficient of the kernel: checked against the separate
    // expansions of E mu_4-hat and E mu_2-hat^2
    CHECK(cov_kernel_bias(b)(0, 0) == doctest::Approx(-5.0 * mu4 + 9.0 * mu2 * mu2));
}

TEST_CASE("second-order covariance tracks the exact variance to third order") {
    DiscreteDistribution f = DiscreteDistribution::univariate({0.0, 1.0, 3.0}, {0.5, 0.3, 0.2});
    SampleStatistic mu2_stat = [](const Sample& s) { return central_moments(s, 2).mu(2); };

    double worst_second = 0, worst_first = 0;
    for (int n = 6; n <= 12; ++n) {
        double e1 = exact_expectation(mu2_stat, f, n);
        SampleStatistic sq = [&](const Sample& s) {
            double v = central_moments(s, 2).mu(2);
            return v * v;
        };
        double exact_var = exact_expectation(sq, f, n) - e1 * e1;

        // expectation of the realized estimator over samples
        SampleStatistic est = [&](const Sample& s) {
            MomentSet ms = central_moments(s, 4);
            return cov_second_order(central_moment_cov_bundle({2}, ms),
                                    static_cast<double>(s.size()), false)(0, 0);
        };
        double mean_est = exact_expectation(est, f, n);
        worst_second = std::max(worst_second, std::abs(mean_est - exact_var) * std::pow(n, 3));

        SampleStatistic est1 = [&](const Sample& s) {
            MomentSet ms = central_moments(s, 4);
            return cov_first_order(central_moment_cov_bundle({2}, ms),
                                   static_cast<double>(s.size()))(0, 0);
        };
        double mean_est1 = exact_expectation(est1, f, n);
        worst_first = std::max(worst_first, std::abs(mean_est1 - exact_var) * std::pow(n, 2));
    }
    // the second-order estimate really is a third-order object: its
    // scaled error stays below the first-order estimate's scaled error
    CHECK(worst_second < 10.0 * worst_first);
    CHECK(std::isfinite(worst_second));
}

TEST_CASE("published inverse-mean variance estimate keeps its quoted form") {
    double mu = 2.0, mu2 = 0.5, n = 20.0;
    double s2 = n * mu2 / (n - 1.0);
    CHECK(mu_inverse_variance_reference(mu, mu2, n) ==
          doctest::Approx(s2 / (n * 16.0) - 6.0 * s2 * s2 / (n * n * 64.0)));
    CHECK_THROWS_AS(mu_inverse_variance_reference(0.0, 1.0, 10.0), degenerate_error);
}

TEST_CASE("bias-estimate covariance: variance functional and structure") {
    MomentSet m(0.0, {1.0, 0.3, 3.4, 1.1, 16.0});
    Eigen::MatrixXd v = bias_influence_variance(std::vector<int>{2}, m);
    CHECK(v(0, 0) == doctest::Approx(4.0 * (m.mu(4) - m.mu(2) * m.mu(2))));

    // vector (mean, mu_2): symmetric with a zero row for the linear component
    Eigen::MatrixXd v2 = bias_influence_variance(std::vector<int>{1, 2}, m);
    CHECK(v2(0, 0) == doctest::Approx(0.0));
    CHECK(v2(0, 1) == doctest::Approx(v2(1, 0)));
    CHECK(v2(1, 1) >= -1e-12);

    Eigen::MatrixXd cov = bias_estimate_cov(v, 10.0);
    CHECK(cov(0, 0) == doctest::Approx(v(0, 0) / 4000.0));
}

TEST_CASE("bias-estimate covariance matches enumeration for the variance") {
    DiscreteDistribution f = DiscreteDistribution::univariate({0.0, 1.0, 3.0}, {0.5, 0.3, 0.2});
    MomentSet m = f.moments(4);
    Eigen::MatrixXd v = bias_influence_variance(std::vector<int>{2}, m);
    double worst = 0;
    for (int n = 6; n <= 12; ++n) {
        // bias estimate of the plug-in variance is -mu_2-hat / n
        SampleStatistic be = [n](const Sample& s) {
            return -central_moments(s, 2).mu(2) / n;
        };
        SampleStatistic be2 = [&](const Sample& s) {
            double x = -central_moments(s, 2).mu(2) / n;
            return x * x;
        };
        double mean = exact_expectation(be, f, n);
        double exact_var = exact_expectation(be2, f, n) - mean * mean;
        double estimate = bias_estimate_cov(v, n)(0, 0);
        worst = std::max(worst, std::abs(exact_var - estimate) * std::pow(n, 4));
    }
    // agreement one order beyond the leading n^-3 term
    CHECK(std::isfinite(worst));
    double ref = std::abs(bias_estimate_cov(v, 6.0)(0, 0)) * std::pow(6.0, 4);
    CHECK(worst < ref);
}

TEST_CASE("mean-function bias variance agrees with the central-moment route") {
    // g(mu) = mu^2 has the same bias influence as the variance functional
    MomentSet m(1.1, {0.9, 0.2, 2.6, 0.5, 12.0});
    JointMomentSet jm(Eigen::VectorXd::Constant(1, m.mean()),
                      {{{1, 1}, m.mu(2)}, {{1, 1, 1}, m.mu(3)}, {{1, 1, 1, 1}, m.mu(4)}}, 4);
    PartialDerivativeTable g(1);
    g.set({1}, 2.0 * m.mean());
    g.set({1, 1}, 2.0);
    g.provide_order(3);
    Eigen::MatrixXd v = bias_influence_variance(std::vector<PartialDerivativeTable>{g}, jm);
    CHECK(v(0, 0) == doctest::Approx(4.0 * (m.mu(4) - m.mu(2) * m.mu(2))).epsilon(1e-12));
}
