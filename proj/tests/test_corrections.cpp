#include <cmath>
#include <random>

#include "doctest.h"
#include "lowbias/corrections.hpp"
#include "lowbias/errors.hpp"

using namespace lowbias;

namespace {

DerivativeBundle mu2_bundle(double mu2) {
    DerivativeBundle b = DerivativeBundle::zero();
    b.t2 = -2.0 * mu2;
    return b;
}

DerivativeBundle mu3_bundle(double mu3) {
    DerivativeBundle b = DerivativeBundle::zero();
    b.t2 = -6.0 * mu3;
    b.t3 = 12.0 * mu3;
    return b;
}

DerivativeBundle random_bundle(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> ud(-2, 2);
    DerivativeBundle b;
    b.t2 = ud(gen);
    b.t3 = ud(gen);
    b.t4 = ud(gen);
    b.t22 = ud(gen);
    b.t23 = ud(gen);
    b.t222 = ud(gen);
    return b;
}

}  // namespace

TEST_CASE("bias coefficients for the variance functional") {
    DerivativeBundle b = mu2_bundle(1.7);
    BiasCoefficients c = bias_coeffs_one_sample(b);
    CHECK(c.c1 == doctest::Approx(-1.7));
    CHECK(c.c2 == doctest::Approx(0.0));
    CHECK(c.c3 == doctest::Approx(0.0));
}

TEST_CASE("bias coefficients vanish for a linear functional") {
    BiasCoefficients c = bias_coeffs_one_sample(DerivativeBundle::zero());
    CHECK(c.c1 == 0.0);
    CHECK(c.c2 == 0.0);
    CHECK(c.c3 == 0.0);
}

TEST_CASE("bias coefficients for the fourth central moment at normal moments") {
    // T(1^i...) for mu_4 at mu_2 = 1, mu_4 = 3 (normal)
    DerivativeBundle b = DerivativeBundle::zero();
    b.t2 = 12.0 * 1.0 - 8.0 * 3.0;  // (r)_2 mu_2^2 - 2 r mu_4 at r=4
    BiasCoefficients c = bias_coeffs_one_sample(b);
    CHECK(c.c1 == doctest::Approx(-6.0));  // -4 mu_4 + 6 mu_2^2

    // full mu_4 bundle at the normal for C_2 = 6 mu_4 - 15 mu_2^2 = 3
    DerivativeBundle full = DerivativeBundle::zero();
    full.t2 = -12.0;
    full.t3 = -(24.0 * 0.0) + 3.0 * 12.0 * (3.0 - 1.0);  // 72
    full.t22 = 24.0 * 1.0 - 4.0 * 24.0 * 1.0;            // -72
    BiasCoefficients c2 = bias_coeffs_one_sample(full);
    CHECK(c2.c2 == doctest::Approx(3.0));
}

TEST_CASE("fourth bias coefficient is gated on the extended keys") {
    DerivativeBundle b = DerivativeBundle::zero();
    CHECK_THROWS_AS(bias_coeffs_one_sample(b, true), unavailable_error);
    DerivativeBundle e = DerivativeBundle::zero_extended();
    BiasCoefficients c = bias_coeffs_one_sample(e, true);
    REQUIRE(c.c4.has_value());
    CHECK(*c.c4 == 0.0);
}

TEST_CASE("correction terms for the variance and third-moment functionals") {
    CorrectionSeries t2 = corrections_one_sample(1.7, mu2_bundle(1.7));
    CHECK(t2.terms[0] == doctest::Approx(1.7));
    CHECK(t2.terms[1] == doctest::Approx(1.7));
    CHECK(t2.terms[2] == doctest::Approx(1.7));

    CorrectionSeries t3 = corrections_one_sample(0.9, mu3_bundle(0.9));
    CHECK(t3.terms[0] == doctest::Approx(3 * 0.9));

    CorrectionSeries s3 = simpler_one_sample(0.9, mu3_bundle(0.9));
    CHECK(s3.terms[0] == doctest::Approx(3 * 0.9));
    CHECK(s3.terms[1] == doctest::Approx(4 * 0.9));
    CHECK(s3.terms[2] == doctest::Approx(0.0));

    CorrectionSeries s2 = simpler_one_sample(1.7, mu2_bundle(1.7));
    CHECK(s2.terms[0] == doctest::Approx(1.7));
    CHECK(s2.terms[1] == doctest::Approx(0.0));
    CHECK(s2.terms[2] == doctest::Approx(0.0));

    CorrectionSeries z = corrections_one_sample(0.0, DerivativeBundle::zero());
    for (double v : z.terms) CHECK(v == 0.0);
}

TEST_CASE("S and T families satisfy the conversion identity") {
    std::mt19937_64 gen(13);
    for (int rep = 0; rep < 100; ++rep) {
        DerivativeBundle b = random_bundle(gen);
        CorrectionSeries t = corrections_one_sample(0.0, b);
        CorrectionSeries s = simpler_one_sample(0.0, b);
        CHECK(s.terms[0] == doctest::Approx(t.terms[0]).epsilon(1e-12));
        CHECK(s.terms[1] == doctest::Approx(t.terms[1] - t.terms[0]).epsilon(1e-12));
        CHECK(s.terms[2] ==
              doctest::Approx(t.terms[2] - 3 * t.terms[1] + 2 * t.terms[0]).epsilon(1e-12));
    }
}

TEST_CASE("assembled T and S estimates differ by O(n^-p)") {
    std::mt19937_64 gen(29);
    DerivativeBundle b = random_bundle(gen);
    double base = 0.8;
    CorrectionSeries t = corrections_one_sample(base, b);
    CorrectionSeries s = simpler_one_sample(base, b);
    for (int p = 2; p <= 4; ++p) {
        double first = 0.0;
        for (double n : {1e2, 1e3, 1e4}) {
            double scaled = (assemble_estimate(t, n, p) - assemble_estimate(s, n, p)) *
                            std::pow(n, p);
            if (first == 0.0) first = std::abs(scaled);
            CHECK(std::abs(scaled) < 4.0 * first + 1e-9);
        }
    }
}

TEST_CASE("assembly reproduces the unbiased variance and third-moment forms") {
    double mu2 = 1.7, mu3 = -0.6;
    CorrectionSeries s2 = simpler_one_sample(mu2, mu2_bundle(mu2));
    CorrectionSeries s3 = simpler_one_sample(mu3, mu3_bundle(mu3));
    for (double n : {4.0, 7.0, 23.0, 100.0}) {
        CHECK(assemble_estimate(s2, n, 2) == doctest::Approx(mu2 * n / (n - 1)).epsilon(1e-14));
        CHECK(assemble_estimate(s3, n, 3) ==
              doctest::Approx(mu3 * n * n / ((n - 1) * (n - 2))).epsilon(1e-13));
        CHECK(assemble_estimate(s3, n, 1) == doctest::Approx(mu3));
    }
    CHECK_THROWS_AS(assemble_estimate(s3, 3.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(assemble_estimate(s3, 2.0, 3), std::invalid_argument);
}

TEST_CASE("truncated estimate gates on the raw plug-in value") {
    CHECK(truncated_estimate(2.5, 1.0, 10.0, 0.1) == 2.5);
    CHECK(truncated_estimate(2.5, 11.0, 10.0, 10.0) == 10.0);
    // inverse-mean protocol: bound u = 10/mu, constant c = mu/10
    double mu = 2.0;
    CHECK(truncated_estimate(0.55, 1.0 / (mu / 20.0), 10.0 / mu, mu / 10.0) ==
          doctest::Approx(mu / 10.0));
    CHECK_THROWS_AS(truncated_estimate(1.0, 1.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("plus estimate stops at the first magnitude violation") {
    CorrectionSeries s;
    s.base = 8.0;
    s.scheme = WeightScheme::PowerOfN;

    s.terms = {4.0, 2.0, 1.0};
    PlusEstimate full = plus_estimate(s, 10.0, 4);
    CHECK(full.order == 4);
    CHECK(full.value == doctest::Approx(assemble_estimate(s, 10.0, 4)));

    s.terms = {90.0, 2.0, 1.0};  // |n^-1 T_1| >= |T_0| at n = 10
    PlusEstimate one = plus_estimate(s, 10.0, 4);
    CHECK(one.order == 1);
    CHECK(one.value == doctest::Approx(8.0));

    s.terms = {4.0, 600.0, 1.0};  // violation at i = 2
    PlusEstimate two = plus_estimate(s, 10.0, 4);
    CHECK(two.order == 2);
    CHECK(two.value == doctest::Approx(8.0 + 0.4));

    // a tie also stops the sequence
    s.terms = {80.0, 2.0, 1.0};
    CHECK(plus_estimate(s, 10.0, 4).order == 1);
}

TEST_CASE("nested estimate composes inner assemblies") {
    CorrectionSeries a;
    a.base = 2.0;
    a.terms = {1.0, -0.5, 0.25};
    CorrectionSeries b;
    b.base = -1.0;
    b.terms = {0.4, 0.1, 0.0};

    CorrectionSeries arr1[] = {a};
    CHECK(nested_estimate(arr1, 50.0, 1) == doctest::Approx(assemble_estimate(a, 50.0, 1)));

    CorrectionSeries arr2[] = {a, b};
    CHECK(nested_estimate(arr2, 50.0, 2) ==
          doctest::Approx(assemble_estimate(a, 50.0, 2) +
                          assemble_estimate(b, 50.0, 1) / 50.0));

    CorrectionSeries zero;
    zero.base = 0.0;
    zero.terms = {0.0, 0.0, 0.0};
    CorrectionSeries zeros[] = {zero, zero, zero};
    CHECK(nested_estimate(zeros, 20.0, 3) == 0.0);

    CorrectionSeries shallow;
    shallow.base = 1.0;  // no terms
    CorrectionSeries arr3[] = {shallow, b};
    CHECK_THROWS_AS(nested_estimate(arr3, 50.0, 2), unavailable_error);
}

namespace {

// tagged bundle of the two-sample ratio of means in nu-notation
MultiBundle ratio_bundle(double ratio, double nu2, double nu3, double nu4) {
    MultiBundle b(2);
    // sample 0 enters linearly, so every pattern touching only tag 0 and
    // every mixed pattern vanishes
    for (int a = 0; a < 2; ++a) {
        b.set({{a, 2}}, a == 1 ? 2 * ratio * nu2 : 0.0);
        b.set({{a, 3}}, a == 1 ? -6 * ratio * nu3 : 0.0);
        b.set({{a, 4}}, a == 1 ? 24 * ratio * nu4 : 0.0);
    }
    for (int a = 0; a < 2; ++a)
        for (int c = a; c < 2; ++c)
            b.set({{a, 2}, {c, 2}}, (a == 1 && c == 1) ? 24 * ratio * nu2 * nu2 : 0.0);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            b.set({{a, 2}, {c, 3}}, (a == 1 && c == 1) ? -120 * ratio * nu2 * nu3 : 0.0);
    for (int a = 0; a < 2; ++a)
        for (int c = a; c < 2; ++c)
            for (int e = c; e < 2; ++e)
                b.set({{a, 2}, {c, 2}, {e, 2}},
                      (a == 1 && c == 1 && e == 1) ? 720 * ratio * nu2 * nu2 * nu2 : 0.0);
    return b;
}

}  // namespace

TEST_CASE("multisample corrections reduce to the one-sample engine at k = 1") {
    std::mt19937_64 gen(101);
    DerivativeBundle b = random_bundle(gen);
    MultiBundle mb(1);
    mb.set({{0, 2}}, *b.t2);
    mb.set({{0, 3}}, *b.t3);
    mb.set({{0, 4}}, *b.t4);
    mb.set({{0, 2}, {0, 2}}, *b.t22);
    mb.set({{0, 2}, {0, 3}}, *b.t23);
    mb.set({{0, 2}, {0, 2}, {0, 2}}, *b.t222);
    double lam[] = {1.0};
    CorrectionSeries multi = corrections_multisample(0.3, mb, lam);
    CorrectionSeries one = corrections_one_sample(0.3, b);
    for (int i = 0; i < 3; ++i)
        CHECK(multi.terms[static_cast<size_t>(i)] ==
              doctest::Approx(one.terms[static_cast<size_t>(i)]).epsilon(1e-14));

    BiasCoefficients cm = bias_coeffs_multisample(mb, lam);
    BiasCoefficients c1 = bias_coeffs_one_sample(b);
    CHECK(cm.c1 == doctest::Approx(c1.c1).epsilon(1e-14));
    CHECK(cm.c2 == doctest::Approx(c1.c2).epsilon(1e-14));
    CHECK(cm.c3 == doctest::Approx(c1.c3).epsilon(1e-14));
}

TEST_CASE("two-sample ratio of means: equal sizes") {
    double ratio = 1.3, nu2 = 0.21, nu3 = 0.05, nu4 = 0.11;
    MultiBundle b = ratio_bundle(ratio, nu2, nu3, nu4);
    double lam[] = {1.0, 1.0};
    CorrectionSeries t = corrections_multisample(ratio, b, lam);
    CHECK(t.terms[0] == doctest::Approx(-nu2 * ratio).epsilon(1e-13));
    CHECK(t.terms[1] == doctest::Approx((-2 * nu3 - nu2 + 3 * nu2 * nu2) * ratio).epsilon(1e-13));
    CHECK(t.terms[2] ==
          doctest::Approx((-6 * nu4 - 6 * nu3 - nu2 - 15 * std::pow(nu2, 3) + 20 * nu3 * nu2 +
                           18 * nu2 * nu2) *
                          ratio)
              .epsilon(1e-13));
    BiasCoefficients c = bias_coeffs_multisample(b, lam);
    CHECK(c.c1 == doctest::Approx(nu2 * ratio).epsilon(1e-13));

    // degenerate second sample: all nu vanish, so every correction does
    MultiBundle z = ratio_bundle(ratio, 0.0, 0.0, 0.0);
    CorrectionSeries tz = corrections_multisample(ratio, z, lam);
    for (double v : tz.terms) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("missing multisample patterns are an explicit error") {
    MultiBundle b(2);
    b.set({{0, 2}}, 1.0);
    double lam[] = {1.0, 1.0};
    CHECK_THROWS_AS(corrections_multisample(0.0, b, lam), unavailable_error);
}

TEST_CASE("matrix method: printed two-dimensional problems") {
    UeMatrixProblem p4;
    p4.degree = 4;
    p4.a1 = Eigen::MatrixXd{{-4, 6}, {1, -3}};
    p4.a2 = Eigen::MatrixXd{{6, -15}, {-2, 5}};
    UeMatrixResult r4 = ue_matrix(p4);
    CHECK(r4.b[1](0, 0) == doctest::Approx(-2));
    CHECK(r4.b[1](0, 1) == doctest::Approx(-6));
    CHECK(r4.b[1](1, 0) == doctest::Approx(-1));
    CHECK(r4.b[1](1, 1) == doctest::Approx(-3));
    CHECK(r4.b[2](0, 0) == doctest::Approx(3));
    CHECK(r4.b[2](0, 1) == doctest::Approx(9));
    CHECK(r4.b[2](1, 0) == doctest::Approx(1));
    CHECK(r4.b[2](1, 1) == doctest::Approx(3));

    UeMatrixProblem p5;
    p5.degree = 5;
    p5.a1 = Eigen::MatrixXd{{-5, 10}, {1, -8}};
    p5.a2 = Eigen::MatrixXd{{10, -50}, {-4, 24}};
    UeMatrixResult r5 = ue_matrix(p5);
    CHECK(r5.b[1](0, 0) == doctest::Approx(-5));
    CHECK(r5.b[1](0, 1) == doctest::Approx(-10));
    CHECK(r5.b[1](1, 0) == doctest::Approx(-1));
    CHECK(r5.b[1](1, 1) == doctest::Approx(-2));
    CHECK(r5.b[2](0, 0) == doctest::Approx(10));
    CHECK(r5.b[2](0, 1) == doctest::Approx(20));
    CHECK(r5.b[2](1, 0) == doctest::Approx(1));
    CHECK(r5.b[2](1, 1) == doctest::Approx(5));
}

TEST_CASE("matrix method denominators and guards") {
    CHECK(ue_matrix_d(1, 4) == doctest::Approx(6));
    CHECK(ue_matrix_d(2, 4) == doctest::Approx(11));
    CHECK(ue_matrix_d(3, 4) == doctest::Approx(6));
    CHECK(ue_matrix_d(1, 5) == doctest::Approx(10));
    CHECK(ue_matrix_d(2, 5) == doctest::Approx(35));

    UeMatrixProblem p;
    p.degree = 4;
    p.a1 = Eigen::MatrixXd::Zero(1, 1);
    p.a2 = Eigen::MatrixXd::Zero(1, 1);
    UeMatrixResult r = ue_matrix(p);
    Eigen::VectorXd t(1);
    t << 2.0;
    CHECK_THROWS_AS(r.evaluate(t, 3.0), std::invalid_argument);
    double n = 12.0;
    double denom = (1 - 1 / n) * (1 - 2 / n) * (1 - 3 / n);
    CHECK(r.evaluate(t, n)[0] ==
          doctest::Approx((2.0 - ue_matrix_d(1, 4) * 2.0 / n + ue_matrix_d(2, 4) * 2.0 / n / n) /
                          denom));
}

TEST_CASE("unbiased-form coefficients follow the product convolution") {
    // degree 3: prod_{i=1,2}(1 - i eps) * (T0 + T1 eps + ...) truncates
    double t[] = {1.0, 4.0, 7.0};
    std::vector<double> a = polynomial_ue_coefficients(t, 3);
    CHECK(a[0] == doctest::Approx(1.0));
    CHECK(a[1] == doctest::Approx(4.0 - 3.0 * 1.0));
    CHECK(a[2] == doctest::Approx(7.0 - 3.0 * 4.0 + 2.0 * 1.0));
    // evaluating the form matches assembling the series where both exist
    double n = 9.0;
    double direct = polynomial_ue_evaluate(a, 3, n);
    CHECK(std::isfinite(direct));
}
