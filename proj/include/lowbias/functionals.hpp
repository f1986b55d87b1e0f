#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lowbias/chain.hpp"
#include "lowbias/corrections.hpp"
#include "lowbias/moments.hpp"
#include "lowbias/sample.hpp"

namespace lowbias {

// ---------------------------------------------------------------------------
// smooth functions of a multivariate mean

// Bundle of T(F) = g(mean vector): every entry is a contraction of g
// derivatives with joint central moments. Keys whose g order is missing
// are left unset.
DerivativeBundle mean_function_bundle(const PartialDerivativeTable& g,
                                      const JointMomentSet& jm);

/// Ratio of two linear forms alpha'mean / beta'mean.
struct LinearRatio {
    double value = 0;
    DerivativeBundle bundle;
    CorrectionSeries t_series, s_series;
};
LinearRatio linear_ratio(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                         const JointMomentSet& jm);

/// (alpha'mean)^p for a univariate sample reduces to the power of the mean.
struct PowerOfMean {
    double value = 0;
    CorrectionSeries t_series, s_series;
    // series normalized by the value in terms of gamma_r = mu_r mean^-r
    // (reported for the inverse mean)
    std::optional<std::array<double, 3>> normalized;
};
PowerOfMean power_of_mean(double exponent, const MomentSet& m);
DerivativeBundle power_of_mean_bundle(double exponent, const MomentSet& m);

// ---------------------------------------------------------------------------
// functions of the means of k univariate samples

// T(a^i b^j ...) = g_{a..b..} mu_i[a] mu_j[b] ...; patterns are set for
// every g order that was provided.
MultiBundle means_of_k_samples_bundle(const PartialDerivativeTable& g,
                                      const std::vector<MomentSet>& per_sample);

/// mean(F_1)/mean(F_2) for two independent univariate samples, in closed
/// form over nu_k = mu_k(F_2) / mean(F_2)^k.
struct TwoSampleRatio {
    double value = 0;
    BiasCoefficients coeffs;
    CorrectionSeries t_series, s_series;
};
TwoSampleRatio ratio_of_two_means(const MomentSet& m1, const MomentSet& m2, double lambda2);

// ---------------------------------------------------------------------------
// central moments and their products

/// The r-th central moment: corrections, bias coefficients including the
/// fourth, and the exactly unbiased form (r <= 7).
struct CentralMomentFunctional {
    int order = 0;
    double value = 0;
    DerivativeBundle bundle;
    BiasCoefficients coeffs;
    CorrectionSeries t_series, s_series;
    std::vector<double> ue_numerator;  // a_0..a_s over prod (1 - i/n)

    double unbiased(double n) const;
};
CentralMomentFunctional central_moment(int r, const MomentSet& m);

// T = prod_j mu_j^{p_j} (real exponents): bundle entries T(1^2), T(1^3),
// T(1^2 1^2) via the closed bracket family.
DerivativeBundle moment_product_bundle(const std::map<int, double>& exponents,
                                       const MomentSet& m);
// specialization T = mu_r^p through the same brackets
DerivativeBundle mu_r_pow_bundle(int r, double p, const MomentSet& m);
// T = mu_2^q carries the full core bundle (all six keys)
DerivativeBundle mu2_pow_bundle(double q, const MomentSet& m);

/// sigma = mu_2^{1/2}: value-normalized corrections plus the printed
/// first-order comparison ratios against the n-1 sample s.d.
struct SdFunctional {
    double value = 0;  // sigma at the supplied moments
    CorrectionSeries t_series, s_series;
    double s1 = 0, s2 = 0, s3 = 0;  // S_i / sigma
    double lambda1 = 0;             // bias{s.d.} / bias{plug-in}, first order
    double lambda2 = 0;             // s2 / (s1 - 1/2)
};
SdFunctional sd_functional(const MomentSet& m);

/// mean/sigma: corrections are available through S_2 only.
struct MeanOverSd {
    double value = 0;
    CorrectionSeries s_series;  // two terms
    double s1 = 0, s2 = 0;
};
MeanOverSd mean_over_sd(const MomentSet& m);

// ---------------------------------------------------------------------------
// return periods, exceedances, conditional means

// Correction terms of 1/p for an event of empirical probability p-hat.
CorrectionSeries return_period_series(double p_hat);
// Estimate of the return period with bias O(n^-4), gated at the lower
// probability bound: returns 1/l when p_hat <= l.
double return_period_estimate(double p_hat, double n, int p, double lower_bound);

/// E[r(X) | X in A] with bias O(n^-4) in closed form over (mu1-hat, p-hat);
/// returns the designated constant when the event is empty.
struct ConditionalMeanEstimate {
    double value = 0;
    double p_hat = 0;
    double mu1_hat = 0;
    bool gated = false;
};
ConditionalMeanEstimate conditional_mean(const Sample& s,
                                         const std::function<bool(const Eigen::VectorXd&)>& region,
                                         const std::function<double(const Eigen::VectorXd&)>& payoff,
                                         double constant = 0.0);

/// Exceedance-law estimates over the threshold u: the conditional d.f.
/// F_u(x) and the mean exceedance, both routed through the conditional
/// mean closed form.
struct ExceedanceEstimates {
    double p_exceed = 0;  // plug-in P(X > u)
    double cdf_plugin = 0, cdf_corrected = 0;
    double mean_plugin = 0, mean_corrected = 0;
};
ExceedanceEstimates exceedance_estimators(const Sample& s, double u, double x,
                                          double constant = 0.0);

// First derivative of T(F) = S(F_u) at a point x, given the derivative of
// S at F_u evaluated at x - u (numeric-check hook, first order only).
double exceedance_first_derivative(double s_derivative_at_shifted, double p_exceed);

// Unbiased estimates of joint central moments from plug-in values:
// index {1,2} or {1,2,3}.
double multivariate_moment_ue(const std::vector<int>& index, const JointMomentSet& jm, double n);

/// Second-order estimates of the correlation and its square.
struct CorrelationEstimates {
    double rho = 0, rho_sq = 0;                    // plug-in values
    double t2_rho = 0, t2_rho_sq = 0;              // T(1^2) for each
    double rho_n = 0, rho_nm1 = 0;                 // T - T(1^2)/(2n), /(2n-2)
    double rho_sq_n = 0, rho_sq_nm1 = 0;
};
CorrelationEstimates correlation_estimators(const JointMomentSet& jm, double n);

// ---------------------------------------------------------------------------
// catalog addressable by string id for the CLI and the experiment runner

struct CatalogEntry {
    std::string id;
    int moment_order = 4;  // moments required from data for the corrections
    std::function<double(const MomentSet&)> value;
    std::function<CorrectionSeries(const MomentSet&)> series_s;
    std::function<CorrectionSeries(const MomentSet&)> series_t;
    // V_T = integral of the squared first derivative; used by the planner
    std::function<double(const MomentSet&)> influence_variance;
};

// Recognized ids: mean_pow:<p>, central_moment:<r>, mu2_pow:<q>, sd,
// mean_over_sd, return_period:<l>.
CatalogEntry catalog_entry(const std::string& id);

}  // namespace lowbias
