#include <cmath>
#include <limits>

#include "doctest.h"
#include "lowbias/corrections.hpp"
#include "lowbias/functionals.hpp"
#include "lowbias/moments.hpp"
#include "lowbias/oracle.hpp"

using namespace lowbias;

namespace {

SampleStatistic plugin_mu(int r) {
    return [r](const Sample& s) { return central_moments(s, r).mu(r); };
}

}  // namespace

TEST_CASE("exact expectation of the mean is the population mean") {
    DiscreteDistribution f = DiscreteDistribution::univariate({-1.0, 2.0, 5.0}, {0.2, 0.5, 0.3});
    double truth = -1.0 * 0.2 + 2.0 * 0.5 + 5.0 * 0.3;
    SampleStatistic mean = [](const Sample& s) { return s.scalars().mean(); };
    for (int n : {1, 3, 6, 9})
        CHECK(exact_expectation(mean, f, n) == doctest::Approx(truth).epsilon(1e-13));
}

TEST_CASE("exact expectation of the plug-in variance under two atoms") {
    double p = 0.3;
    DiscreteDistribution f = DiscreteDistribution::univariate({0.0, 1.0}, {1 - p, p});
    for (int n : {2, 5, 11}) {
        double expect = (1.0 - 1.0 / n) * p * (1 - p);
        CHECK(exact_expectation(plugin_mu(2), f, n) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("enumeration weights form a partition of unity") {
    DiscreteDistribution f =
        DiscreteDistribution::univariate({0.0, 1.0, 3.0, 7.0}, {0.4, 0.3, 0.2, 0.1});
    SampleStatistic one = [](const Sample&) { return 1.0; };
    for (int n : {4, 9, 12})
        CHECK(exact_expectation(one, f, n) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration budget is enforced with a count in the message") {
    std::vector<double> atoms, probs;
    for (int i = 0; i < 12; ++i) {
        atoms.push_back(i);
        probs.push_back(1.0 / 12);
    }
    DiscreteDistribution wide = DiscreteDistribution::univariate(atoms, probs);
    SampleStatistic one = [](const Sample&) { return 1.0; };
    CHECK_THROWS_AS(exact_expectation(one, wide, 40), std::invalid_argument);
}

TEST_CASE("plug-in variance bias curve is exactly -mu_2 / n") {
    DiscreteDistribution f = DiscreteDistribution::univariate({0.0, 1.0, 3.0}, {0.5, 0.3, 0.2});
    double mu2 = f.moments(2).mu(2);
    auto family = [&](int) { return plugin_mu(2); };
    std::vector<BiasPoint> curve = exact_bias_curve(family, f, 4, 10, mu2);
    for (const BiasPoint& pt : curve)
        CHECK(pt.bias == doctest::Approx(-mu2 / pt.n).epsilon(1e-12));
    CHECK(sup_scaled_bias(curve, 1) == doctest::Approx(mu2).epsilon(1e-12));
}

TEST_CASE("fourth-moment unbiased form has zero exact bias") {
    DiscreteDistribution f = DiscreteDistribution::univariate({0.0, 1.0, 3.0}, {0.5, 0.3, 0.2});
    double truth = f.moments(4).mu(4);
    SampleStatistic ue = [](const Sample& s) {
        MomentSet m = central_moments(s, 4);
        return central_moment(4, m).unbiased(static_cast<double>(s.size()));
    };
    double bias = exact_expectation(ue, f, 6) - truth;
    CHECK(std::abs(bias) <= 1e-9 * std::abs(truth));
}

TEST_CASE("inverse mean without truncation explodes on atoms straddling zero") {
    // one atom set has compositions whose sample mean is near zero, so the
    // raw series is enormous; the truncation gate keeps the curve finite
    DiscreteDistribution f =
        DiscreteDistribution::univariate({-1.0, 0.25, 1.0}, {0.25, 0.25, 0.5});
    double mu = f.mean_scalar();
    double truth = 1.0 / mu;

    SampleStatistic raw = [](const Sample& s) {
        MomentSet m = central_moments(s, 4);
        if (m.mean() == 0.0) return std::numeric_limits<double>::infinity();
        return assemble_estimate(power_of_mean(-1.0, m).s_series, static_cast<double>(s.size()),
                                 4);
    };
    double u = 10.0 / mu, c = mu / 10.0;
    SampleStatistic gated = [u, c](const Sample& s) {
        MomentSet m = central_moments(s, 4);
        double plug = 1.0 / m.mean();
        if (std::abs(plug) >= u) return c;
        return assemble_estimate(power_of_mean(-1.0, m).s_series, static_cast<double>(s.size()),
                                 4);
    };
    double raw_bias = std::abs(exact_expectation(raw, f, 8) - truth);
    double gated_bias = std::abs(exact_expectation(gated, f, 8) - truth);
    CHECK(raw_bias > 100.0 * gated_bias);
    CHECK(std::isfinite(gated_bias));
}

TEST_CASE("two-sample enumeration: ratio of means is conditionally clean") {
    DiscreteDistribution f1 = DiscreteDistribution::univariate({0.0, 1.0, 2.0}, {0.3, 0.4, 0.3});
    DiscreteDistribution f2 = DiscreteDistribution::univariate({1.0, 2.0, 4.0}, {0.5, 0.3, 0.2});
    // linear statistic of the first sample only: exactly unbiased
    auto stat = [](const Sample& a, const Sample& b) {
        (void)b;
        return a.scalars().mean();
    };
    CHECK(exact_expectation_two(stat, f1, f2, 5, 6) ==
          doctest::Approx(f1.mean_scalar()).epsilon(1e-12));
}

TEST_CASE("bivariate and trivariate product-moment unbiased forms") {
    Eigen::MatrixXd atoms2(3, 2);
    atoms2 << 0, 1, 1, 0, 2, 2;
    Eigen::VectorXd probs(3);
    probs << 0.5, 0.3, 0.2;
    DiscreteDistribution f2(atoms2, probs);
    double truth12 = f2.joint_moments(2).mu({1, 2});
    SampleStatistic ue12 = [](const Sample& s) {
        JointMomentSet jm = joint_central_moments(s, 2);
        return multivariate_moment_ue({1, 2}, jm, static_cast<double>(s.size()));
    };
    CHECK(std::abs(exact_expectation(ue12, f2, 5) - truth12) <= 1e-10);

    Eigen::MatrixXd atoms3(3, 3);
    atoms3 << 0, 1, 2, 1, 0, 1, 2, 2, 0;
    DiscreteDistribution f3(atoms3, probs);
    double truth123 = f3.joint_moments(3).mu({1, 2, 3});
    SampleStatistic ue123 = [](const Sample& s) {
        JointMomentSet jm = joint_central_moments(s, 3);
        return multivariate_moment_ue({1, 2, 3}, jm, static_cast<double>(s.size()));
    };
    // adjudicates the divisor (1 - 1/n)(1 - 2/n), matching the univariate
    // third moment under coordinate collapse
    CHECK(std::abs(exact_expectation(ue123, f3, 6) - truth123) <= 1e-10);
}

TEST_CASE("conditional mean closed form is exact when the event is certain") {
    // both atoms inside the region: the bracket collapses to the sample
    // mean of the payoff, which enumeration confirms is exactly unbiased
    DiscreteDistribution f = DiscreteDistribution::univariate({1.0, 4.0}, {0.6, 0.4});
    double truth = 1.0 * 0.6 + 4.0 * 0.4;
    SampleStatistic stat = [](const Sample& s) {
        auto whole = [](const Eigen::VectorXd&) { return true; };
        auto payoff = [](const Eigen::VectorXd& v) { return v[0]; };
        return conditional_mean(s, whole, payoff).value;
    };
    CHECK(std::abs(exact_expectation(stat, f, 6) - truth) <= 1e-10);
}
