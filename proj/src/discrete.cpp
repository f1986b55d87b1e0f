#include "lowbias/discrete.hpp"

#include <cmath>
#include <stdexcept>

namespace lowbias {

DiscreteDistribution::DiscreteDistribution(Eigen::MatrixXd atoms_in, Eigen::VectorXd probs_in)
    : atoms(std::move(atoms_in)), probs(std::move(probs_in)) {
    if (atoms.rows() != probs.size() || probs.size() < 1)
        throw std::invalid_argument("atom/probability size mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) throw std::invalid_argument("probabilities must be positive");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("probabilities must sum to 1");
}

DiscreteDistribution DiscreteDistribution::univariate(std::vector<double> a,
                                                      std::vector<double> p) {
    Eigen::MatrixXd atoms(static_cast<Eigen::Index>(a.size()), 1);
    Eigen::VectorXd probs(static_cast<Eigen::Index>(p.size()));
    for (size_t i = 0; i < a.size(); ++i) atoms(static_cast<Eigen::Index>(i), 0) = a[i];
    for (size_t i = 0; i < p.size(); ++i) probs[static_cast<Eigen::Index>(i)] = p[i];
    return DiscreteDistribution(std::move(atoms), std::move(probs));
}

MomentSet DiscreteDistribution::moments(int max_order) const {
    if (dim() != 1) throw std::invalid_argument("scalar moments need a univariate distribution");
    return central_moments_weighted(atoms.col(0), probs, max_order);
}

JointMomentSet DiscreteDistribution::joint_moments(int max_order) const {
    return joint_central_moments_weighted(atoms, probs, max_order);
}

double DiscreteDistribution::mean_scalar() const {
    if (dim() != 1) throw std::invalid_argument("mean_scalar needs a univariate distribution");
    return atoms.col(0).dot(probs);
}

namespace {

double mixture_value(const WeightedFunctional& functional, const DiscreteDistribution& f,
                     const Eigen::VectorXd& x, double eps) {
    Eigen::MatrixXd atoms(f.atoms.rows() + 1, f.atoms.cols());
    atoms.topRows(f.atoms.rows()) = f.atoms;
    atoms.row(f.atoms.rows()) = x.transpose();
    Eigen::VectorXd w(f.probs.size() + 1);
    w.head(f.probs.size()) = (1.0 - eps) * f.probs;
    w[f.probs.size()] = eps;
    return functional(atoms, w);
}

}  // namespace

double gateaux_derivative(const WeightedFunctional& functional, const DiscreteDistribution& f,
                          const Eigen::VectorXd& x, double eps) {
    if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("eps must be in (0, 0.5]");
    double up = mixture_value(functional, f, x, eps);
    double down = mixture_value(functional, f, x, -eps);
    return (up - down) / (2.0 * eps);
}

double gateaux_derivative(const WeightedFunctional& functional, const DiscreteDistribution& f,
                          double x, double eps) {
    Eigen::VectorXd v(1);
    v[0] = x;
    return gateaux_derivative(functional, f, v, eps);
}

}  // namespace lowbias
