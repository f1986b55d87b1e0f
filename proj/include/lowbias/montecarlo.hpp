#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowbias/distributions.hpp"
#include "lowbias/functionals.hpp"

namespace lowbias {

struct EstimatorFamily {
    enum class Kind { S, T, TruncatedS, Plus };
    Kind kind = Kind::S;
    // truncation gate; when both are zero the inverse-mean protocol
    // u = 10 |T(F)|, c = 1/u is filled in from the true value
    double u = 0.0, c = 0.0;

    static EstimatorFamily parse(const std::string& name);
    std::string name() const;
};

struct BaselineSpec {
    bool jackknife = false;
    int bootstrap = 0;  // resample count B, 0 disables
};

struct ExperimentConfig {
    std::string functional_id;
    Distribution dist = Distribution::uniform01();
    int n = 10;
    int p = 1;
    long replications = 1000;
    std::uint64_t seed = 1;
    EstimatorFamily family;
    BaselineSpec baselines;
    int threads = 1;
};

struct BaselineReport {
    double mean = 0, se = 0;
    long evaluations = 0;
};

struct ExperimentReport {
    std::string functional_id;
    std::string distribution;
    std::string family;
    int n = 0, p = 0;
    long replications = 0;
    std::uint64_t seed = 0;
    double estimator_mean = 0, se = 0;
    double truth = 0;
    bool truth_nonzero = true;
    double relative_bias = 0;  // defined only when truth is nonzero
    double absolute_bias = 0;
    long evaluations = 0;
    double seconds = 0;
    std::optional<BaselineReport> jackknife, bootstrap;
};

// Draws N samples of size n, applies the corrected estimator (and any
// baselines) to each, and reports bias against the analytic truth.
// Deterministic for fixed (seed, N, n) regardless of the thread count.
ExperimentReport run_bias_experiment(const ExperimentConfig& config);

using PluginEvaluator = std::function<double(const Eigen::VectorXd&)>;

// n T - (n-1) mean of leave-one-out values; n+1 evaluations.
double jackknife_baseline(const Eigen::VectorXd& x, const PluginEvaluator& t,
                          long* evaluations = nullptr);
// 2 T - mean over B resampled values; B+1 evaluations.
double bootstrap_baseline(const Eigen::VectorXd& x, const PluginEvaluator& t, int b,
                          std::uint64_t seed, long* evaluations = nullptr);

struct PlanResult {
    bool defined = false;
    double phi = 0;        // 4 V_T / S_p^2
    double required = 0;   // eps^-2 n^{2p-1} phi, rounded up
    std::string note;
};

// Replications needed to estimate the bias of the p-th order estimate to
// relative error eps.
PlanResult plan_simulations(const std::string& functional_id, const Distribution& dist, double n,
                            int p, double eps);

// Locale-independent CSV. Wall-clock and thread count are not part of the
// schema so that identical seeds give identical bytes.
std::string reports_to_csv(const std::vector<ExperimentReport>& reports);
std::vector<ExperimentReport> reports_from_csv(const std::string& csv);
std::string reports_to_markdown(const std::vector<ExperimentReport>& reports);

}  // namespace lowbias
