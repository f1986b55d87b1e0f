#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "lowbias/derivatives.hpp"
#include "lowbias/errors.hpp"
#include "lowbias/montecarlo.hpp"
#include "lowbias/oracle.hpp"

using namespace lowbias;

TEST_CASE("normal quantile function hits reference points") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.84134474606854293) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("analytic moments match simulation within five standard errors") {
    // smoke test over a million draws per distribution
    const long draws = 1'000'000;
    for (const char* spec : {"normal:0.5,2", "exp:1", "gamma:3", "uniform", "bernoulli:0.3"}) {
        Distribution dist = Distribution::parse(spec);
        MomentSet analytic = dist.moments(8);
        Rng rng(std::hash<std::string>{}(spec));
        Eigen::VectorXd x(draws);
        for (long i = 0; i < draws; ++i) x[i] = dist.draw(rng);
        MomentSet empirical = central_moments(x, 4);
        CHECK(std::abs(empirical.mean() - analytic.mean()) <=
              5.0 * std::sqrt(analytic.mu(2) / draws));
        for (int r = 2; r <= 4; ++r) {
            double se = std::sqrt(bracket_pair(r, r, analytic) / draws);
            CHECK(std::abs(empirical.mu(r) - analytic.mu(r)) <= 5.0 * se);
        }
    }
}

TEST_CASE("jackknife identities") {
    Eigen::VectorXd x(9);
    x << 1.2, -0.4, 2.2, 0.8, 1.9, -1.0, 0.1, 3.0, 0.5;

    long evals = 0;
    PluginEvaluator mean_eval = [](const Eigen::VectorXd& v) { return v.mean(); };
    CHECK(jackknife_baseline(x, mean_eval, &evals) == doctest::Approx(x.mean()).epsilon(1e-13));
    CHECK(evals == x.size() + 1);

    PluginEvaluator mu2_eval = [](const Eigen::VectorXd& v) {
        return central_moments(v, 2).mu(2);
    };
    double n = static_cast<double>(x.size());
    CHECK(jackknife_baseline(x, mu2_eval) ==
          doctest::Approx(n * central_moments(x, 2).mu(2) / (n - 1.0)).epsilon(1e-12));
}

TEST_CASE("bootstrap bias correction approaches the closed expectation") {
    Eigen::VectorXd x(12);
    x << 1.2, -0.4, 2.2, 0.8, 1.9, -1.0, 0.1, 3.0, 0.5, 2.8, -0.7, 1.1;
    double n = static_cast<double>(x.size());
    double mu2_hat = central_moments(x, 2).mu(2);

    PluginEvaluator mu2_eval = [](const Eigen::VectorXd& v) {
        return central_moments(v, 2).mu(2);
    };
    long evals = 0;
    int b = 40000;
    double corrected = bootstrap_baseline(x, mu2_eval, b, 99, &evals);
    CHECK(evals == b + 1);
    // E* of the resampled plug-in variance is (1 - 1/n) mu_2-hat
    CHECK(corrected == doctest::Approx(mu2_hat * (1.0 + 1.0 / n)).epsilon(0.01));
}

TEST_CASE("experiment runner: exact unbiasedness of the corrected variance") {
    ExperimentConfig cfg;
    cfg.functional_id = "central_moment:2";
    cfg.dist = Distribution::parse("normal:0,1");
    cfg.n = 7;
    cfg.p = 2;
    cfg.replications = 4000;
    cfg.seed = 42;
    ExperimentReport r = run_bias_experiment(cfg);
    CHECK(r.truth == doctest::Approx(1.0));
    CHECK(std::abs(r.relative_bias) <= 3.0 * r.se);
    CHECK(r.evaluations == cfg.replications);
}

TEST_CASE("experiment runner is deterministic across thread counts") {
    ExperimentConfig cfg;
    cfg.functional_id = "sd";
    cfg.dist = Distribution::parse("exp:1");
    cfg.n = 10;
    cfg.p = 2;
    cfg.replications = 600;
    cfg.seed = 2026;
    cfg.threads = 1;
    ExperimentReport one = run_bias_experiment(cfg);
    cfg.threads = 4;
    ExperimentReport four = run_bias_experiment(cfg);
    CHECK(one.estimator_mean == four.estimator_mean);  // bitwise
    CHECK(one.se == four.se);
    CHECK(reports_to_csv({one}) == reports_to_csv({four}));
}

TEST_CASE("plan_simulations reproduces the derivable planning constants") {
    Distribution normal = Distribution::parse("normal:0,1");
    PlanResult mu2 = plan_simulations("central_moment:2", normal, 50.0, 1, 0.1);
    REQUIRE(mu2.defined);
    CHECK(mu2.phi == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(mu2.required == doctest::Approx(800.0 * 50.0));

    PlanResult mu2p2 = plan_simulations("central_moment:2", normal, 50.0, 2, 0.1);
    CHECK_FALSE(mu2p2.defined);
    CHECK(mu2p2.note.find("not defined") != std::string::npos);

    PlanResult mu4p1 = plan_simulations("central_moment:4", normal, 10.0, 1, 0.1);
    CHECK(mu4p1.phi == doctest::Approx(32.0 / 3.0).epsilon(1e-12));
    PlanResult mu4p2 = plan_simulations("central_moment:4", normal, 10.0, 2, 0.1);
    CHECK(mu4p2.phi == doctest::Approx(128.0 / 75.0).epsilon(1e-12));

    PlanResult sd1 = plan_simulations("sd", normal, 10.0, 1, 0.1);
    CHECK(sd1.phi == doctest::Approx(32.0 / 9.0).epsilon(1e-12));
    // exponential shares the first-order constant
    PlanResult sd1e = plan_simulations("sd", Distribution::parse("exp:1"), 10.0, 1, 0.1);
    CHECK(sd1e.phi == doctest::Approx(32.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("csv round-trips field for field") {
    ExperimentConfig cfg;
    cfg.functional_id = "mean_pow:-1";
    cfg.dist = Distribution::parse("normal:2,1");
    cfg.n = 10;
    cfg.p = 2;
    cfg.replications = 500;
    cfg.seed = 7;
    cfg.family = EstimatorFamily::parse("truncated-S");
    ExperimentReport r = run_bias_experiment(cfg);
    std::string csv = reports_to_csv({r});
    std::vector<ExperimentReport> parsed = reports_from_csv(csv);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].functional_id == r.functional_id);
    CHECK(parsed[0].distribution == r.distribution);
    CHECK(parsed[0].family == r.family);
    CHECK(parsed[0].n == r.n);
    CHECK(parsed[0].p == r.p);
    CHECK(parsed[0].replications == r.replications);
    CHECK(parsed[0].seed == r.seed);
    CHECK(parsed[0].estimator_mean == r.estimator_mean);  // exact round trip
    CHECK(parsed[0].truth == r.truth);
    CHECK(parsed[0].relative_bias == r.relative_bias);
    CHECK(parsed[0].absolute_bias == r.absolute_bias);
    CHECK(parsed[0].se == r.se);
    CHECK(parsed[0].evaluations == r.evaluations);
}

TEST_CASE("markdown table mirrors the distribution-by-grid layout") {
    ExperimentConfig cfg;
    cfg.functional_id = "central_moment:2";
    cfg.dist = Distribution::parse("uniform");
    cfg.replications = 50;
    cfg.seed = 5;
    std::vector<ExperimentReport> rows;
    for (int n : {5, 10})
        for (int p : {1, 2}) {
            cfg.n = n;
            cfg.p = p;
            rows.push_back(run_bias_experiment(cfg));
        }
    std::string md = reports_to_markdown(rows);
    CHECK(md.find("| distribution | run |") != std::string::npos);
    CHECK(md.find("n=5 p=1") != std::string::npos);
    CHECK(md.find("n=10 p=2") != std::string::npos);
    CHECK(md.find("uniform(0,1)") != std::string::npos);
}

TEST_CASE("invalid experiment configurations are rejected") {
    ExperimentConfig cfg;
    cfg.functional_id = "central_moment:2";
    cfg.dist = Distribution::parse("uniform");
    cfg.replications = 0;
    CHECK_THROWS_AS(run_bias_experiment(cfg), std::invalid_argument);
    cfg.replications = 10;
    cfg.n = 1;
    cfg.p = 2;
    CHECK_THROWS_AS(run_bias_experiment(cfg), std::invalid_argument);
}
