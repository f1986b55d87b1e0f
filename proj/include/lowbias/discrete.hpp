#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lowbias/moments.hpp"

namespace lowbias {

/// A distribution on finitely many atoms in R^d. Probabilities must be
/// positive and sum to 1 within 1e-12. The exact-expectation oracle and
/// the Gateaux probe both work on these.
struct DiscreteDistribution {
    Eigen::MatrixXd atoms;  // m x d
    Eigen::VectorXd probs;  // length m

    DiscreteDistribution(Eigen::MatrixXd atoms_in, Eigen::VectorXd probs_in);
    static DiscreteDistribution univariate(std::vector<double> atoms,
                                           std::vector<double> probs);

    int count() const { return static_cast<int>(probs.size()); }
    int dim() const { return static_cast<int>(atoms.cols()); }

    MomentSet moments(int max_order) const;            // requires dim() == 1
    JointMomentSet joint_moments(int max_order) const;
    double mean_scalar() const;
};

/// A functional evaluated on a finite signed mixture: atoms with weights
/// summing to 1 (weights may be negative for difference probes).
using WeightedFunctional =
    std::function<double(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& weights)>;

// First von Mises derivative of T at F in direction x, by symmetric
// difference over T(F + eps (delta_x - F)) with eps in (0, 0.5].
double gateaux_derivative(const WeightedFunctional& functional, const DiscreteDistribution& f,
                          const Eigen::VectorXd& x, double eps);
double gateaux_derivative(const WeightedFunctional& functional, const DiscreteDistribution& f,
                          double x, double eps);

}  // namespace lowbias
