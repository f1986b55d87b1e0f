#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lowbias/chain.hpp"
#include "lowbias/moments.hpp"

namespace lowbias {

/// Integrated derivative products of a vector functional at coincident
/// sample tags (one sample). Entry (alpha, beta) of each matrix is the
/// corresponding mixed integral; taa is the first-order covariance kernel
/// and must always be present.
struct CovarianceBundle {
    Eigen::MatrixXd taa;                   // int T^a_x T^b_x dF
    std::optional<Eigen::MatrixXd> tabab;  // int int T^a_xy T^b_xy
    std::optional<Eigen::MatrixXd> ta2a;   // int T^a_xx T^b_x
    std::optional<Eigen::MatrixXd> ta2bb;  // int int T^a_xxy T^b_y

    int components() const { return static_cast<int>(taa.rows()); }
};

// First-order covariance estimate n^-1 T(a,a).
Eigen::MatrixXd cov_first_order(const CovarianceBundle& b, double n);

// Covariance estimate with bias O(n^-3). For the raw plug-in statistic:
//   (n-1)^-1 taa - n^-2 { sym(ta2a) + tabab/2 },
// for corrected estimators of order >= 2:
//   n^-1 taa + n^-2 { taa - 2 sym(ta2a) - sym(ta2bb) - tabab/2 },
// where sym(M) = (M + M')/2 doubles the off-diagonal the way the paired
// index sum does. prefer_power_weights replaces (n-1)^-1 by n^-1 + n^-2.
Eigen::MatrixXd cov_second_order(const CovarianceBundle& b, double n, bool corrected,
                                 bool prefer_power_weights = false);

// Delta correction linking the plug-in and corrected-estimator kernels.
Eigen::MatrixXd delta_correction(const CovarianceBundle& b);

// First bias coefficient of the covariance kernel as a functional (used
// by the second-order weights; exposed for tests).
Eigen::MatrixXd cov_kernel_bias(const CovarianceBundle& b);

// Bundle for a vector of smooth functions of a multivariate mean: one
// derivative table per component, contracted against joint moments.
CovarianceBundle mean_function_cov_bundle(const std::vector<PartialDerivativeTable>& g,
                                          const JointMomentSet& jm);

// Bundle for a vector of central moments (order 1 denotes the mean),
// computed by exact polynomial integration.
CovarianceBundle central_moment_cov_bundle(const std::vector<int>& orders, const MomentSet& m);

// Bundle for (a'mean)^p of a univariate sample (1 x 1 matrices).
CovarianceBundle power_of_mean_cov_bundle(double p, const MomentSet& m);

// Published second-order variance estimate for the inverse mean, kept in
// its quoted form: n^-1 mu^-4 s^2 - 6 n^-2 mu^-6 s^4 with s^2 the
// unbiased variance.
double mu_inverse_variance_reference(double mean_hat, double mu2_hat, double n);

/// Covariance of the first-order bias estimate. V is the influence
/// variance of the bias functional B = sum lambda T(a^2); the estimate of
/// covar(B(F-hat)/(2n)) is V(F-hat) / (4 n^3).
Eigen::MatrixXd bias_influence_variance(const std::vector<int>& orders, const MomentSet& m);
Eigen::MatrixXd bias_influence_variance(const std::vector<PartialDerivativeTable>& g,
                                        const JointMomentSet& jm);
Eigen::MatrixXd bias_estimate_cov(const Eigen::MatrixXd& influence_variance, double n);

}  // namespace lowbias
