#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "lowbias/sample.hpp"

namespace lowbias {

/// Central moments mu_r of one univariate distribution up to a fixed
/// order, plus the mean. mu_0 = 1 and mu_1 = 0 by construction; indices
/// below zero evaluate to 0 so that closed forms with vanishing falling
/// factorials can be written without special cases.
class MomentSet {
public:
    MomentSet(double mean, std::vector<double> central_from_order_2);

    double mean() const { return mean_; }
    int max_order() const { return static_cast<int>(mu_.size()) - 1; }

    double mu(int r) const;
    // Standardized moment beta_r = mu_r mu_2^{-r/2}; requires mu_2 > 0.
    double beta(int r) const;
    double sd() const;

private:
    double mean_;
    std::vector<double> mu_;  // mu_[r] for r = 0..R
};

/// Joint central moments mu[j1...ja] of a d-variate distribution, stored
/// under the canonical (sorted) multi-index. Indices are 1-based.
class JointMomentSet {
public:
    JointMomentSet(Eigen::VectorXd mean, std::map<std::vector<int>, double> moments,
                   int max_order);

    const Eigen::VectorXd& mean() const { return mean_; }
    int dim() const { return static_cast<int>(mean_.size()); }
    int max_order() const { return max_order_; }

    double mu(std::vector<int> index) const;
    double mu(std::initializer_list<int> index) const;

private:
    Eigen::VectorXd mean_;
    std::map<std::vector<int>, double> mu_;
    int max_order_;
};

// Plug-in central moments of a univariate sample: divisor is exactly n.
// Two passes (mean, then centered powers) with compensated summation.
MomentSet central_moments(const Eigen::VectorXd& x, int max_order);
MomentSet central_moments(const Sample& s, int max_order);

// Central moments of a finite weighted distribution (weights sum to 1;
// negative weights are allowed so that signed mixtures can be probed).
MomentSet central_moments_weighted(const Eigen::VectorXd& atoms,
                                   const Eigen::VectorXd& weights, int max_order);

// Plug-in joint central moments over all multi-indices of total order
// 2..max_order.
JointMomentSet joint_central_moments(const Sample& s, int max_order);
JointMomentSet joint_central_moments_weighted(const Eigen::MatrixXd& atoms,
                                              const Eigen::VectorXd& weights,
                                              int max_order);

// Fraction of observations satisfying the predicate.
double empirical_probability(const Sample& s,
                             const std::function<bool(const Eigen::VectorXd&)>& event);

// Neumaier-compensated sum.
double compensated_sum(const Eigen::VectorXd& v);

}  // namespace lowbias
