#include "lowbias/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lowbias/errors.hpp"

namespace lowbias {

double compensated_sum(const Eigen::VectorXd& v) {
    double s = 0.0, c = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double t = s + v[i];
        if (std::abs(s) >= std::abs(v[i]))
            c += (s - t) + v[i];
        else
            c += (v[i] - t) + s;
        s = t;
    }
    return s + c;
}

MomentSet::MomentSet(double mean, std::vector<double> central_from_order_2) : mean_(mean) {
    mu_.assign(central_from_order_2.size() + 2, 0.0);
    mu_[0] = 1.0;
    mu_[1] = 0.0;
    for (size_t r = 0; r < central_from_order_2.size(); ++r) mu_[r + 2] = central_from_order_2[r];
    if (mu_.size() < 3) throw std::invalid_argument("moment set needs order >= 2");
    if (mu_[2] < 0) throw std::invalid_argument("mu_2 must be nonnegative");
}

double MomentSet::mu(int r) const {
    if (r < 0) return 0.0;
    if (r >= static_cast<int>(mu_.size()))
        throw unavailable_error("mu_" + std::to_string(r) + " beyond stored order");
    return mu_[static_cast<size_t>(r)];
}

double MomentSet::beta(int r) const {
    double v = mu(2);
    if (v <= 0) throw degenerate_error("beta_r needs mu_2 > 0");
    return mu(r) * std::pow(v, -0.5 * r);
}

double MomentSet::sd() const { return std::sqrt(mu(2)); }

namespace {

std::vector<double> centered_power_means(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                         double mean, int max_order) {
    // One vector of centered values, powered up in place; weights may be
    // signed (Gateaux probes use signed mixtures).
    Eigen::VectorXd h = x.array() - mean;
    Eigen::VectorXd pw = h;
    std::vector<double> out;
    out.reserve(static_cast<size_t>(max_order) - 1);
    for (int r = 2; r <= max_order; ++r) {
        pw = pw.cwiseProduct(h).eval();
        out.push_back(compensated_sum(pw.cwiseProduct(w)));
    }
    return out;
}

}  // namespace

MomentSet central_moments(const Eigen::VectorXd& x, int max_order) {
    if (max_order < 2) throw std::invalid_argument("central moments need order >= 2");
    if (x.size() < 1) throw std::invalid_argument("invalid sample: empty");
    double n = static_cast<double>(x.size());
    double mean = compensated_sum(x) / n;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(x.size(), 1.0 / n);
    return MomentSet(mean, centered_power_means(x, w, mean, max_order));
}

MomentSet central_moments(const Sample& s, int max_order) {
    return central_moments(s.scalars(), max_order);
}

MomentSet central_moments_weighted(const Eigen::VectorXd& atoms, const Eigen::VectorXd& weights,
                                   int max_order) {
    if (max_order < 2) throw std::invalid_argument("central moments need order >= 2");
    if (atoms.size() != weights.size() || atoms.size() < 1)
        throw std::invalid_argument("atom/weight size mismatch");
    double mean = compensated_sum(atoms.cwiseProduct(weights));
    std::vector<double> mus = centered_power_means(atoms, weights, mean, max_order);
    // A signed mixture can carry slightly negative mu_2 through rounding.
    if (mus[0] < 0 && mus[0] > -1e-14) mus[0] = 0;
    return MomentSet(mean, std::move(mus));
}

JointMomentSet::JointMomentSet(Eigen::VectorXd mean, std::map<std::vector<int>, double> moments,
                               int max_order)
    : mean_(std::move(mean)), mu_(std::move(moments)), max_order_(max_order) {}

double JointMomentSet::mu(std::vector<int> index) const {
    if (index.size() == 1) return 0.0;  // first-order central moments vanish
    std::sort(index.begin(), index.end());
    for (int j : index)
        if (j < 1 || j > dim()) throw std::invalid_argument("joint moment index out of range");
    auto it = mu_.find(index);
    if (it == mu_.end()) {
        std::string key;
        for (int j : index) key += std::to_string(j);
        throw unavailable_error("mu[" + key + "] beyond stored order");
    }
    return it->second;
}

double JointMomentSet::mu(std::initializer_list<int> index) const {
    return mu(std::vector<int>(index));
}

namespace {

// All multisets of {1..d} of the given size, in lexicographic order.
void enumerate_multisets(int d, int size, std::vector<int>& prefix,
                         const std::function<void(const std::vector<int>&)>& emit) {
    if (static_cast<int>(prefix.size()) == size) {
        emit(prefix);
        return;
    }
    int lo = prefix.empty() ? 1 : prefix.back();
    for (int j = lo; j <= d; ++j) {
        prefix.push_back(j);
        enumerate_multisets(d, size, prefix, emit);
        prefix.pop_back();
    }
}

JointMomentSet joint_moments_impl(const Eigen::MatrixXd& obs, const Eigen::VectorXd& w,
                                  int max_order) {
    if (max_order < 2) throw std::invalid_argument("joint central moments need order >= 2");
    int d = static_cast<int>(obs.cols());
    Eigen::VectorXd mean(d);
    for (int j = 0; j < d; ++j) mean[j] = compensated_sum(obs.col(j).cwiseProduct(w));
    Eigen::MatrixXd centered = obs.rowwise() - mean.transpose();
    std::map<std::vector<int>, double> mus;
    std::vector<int> prefix;
    for (int size = 2; size <= max_order; ++size) {
        enumerate_multisets(d, size, prefix, [&](const std::vector<int>& idx) {
            Eigen::VectorXd prod = w;
            for (int j : idx) prod = prod.cwiseProduct(centered.col(j - 1)).eval();
            mus[idx] = compensated_sum(prod);
        });
    }
    return JointMomentSet(std::move(mean), std::move(mus), max_order);
}

}  // namespace

JointMomentSet joint_central_moments(const Sample& s, int max_order) {
    double n = static_cast<double>(s.size());
    Eigen::VectorXd w = Eigen::VectorXd::Constant(s.size(), 1.0 / n);
    return joint_moments_impl(s.data(), w, max_order);
}

JointMomentSet joint_central_moments_weighted(const Eigen::MatrixXd& atoms,
                                              const Eigen::VectorXd& weights, int max_order) {
    if (atoms.rows() != weights.size())
        throw std::invalid_argument("atom/weight size mismatch");
    return joint_moments_impl(atoms, weights, max_order);
}

double empirical_probability(const Sample& s,
                             const std::function<bool(const Eigen::VectorXd&)>& event) {
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (event(s.data().row(i).transpose())) ++hits;
    return static_cast<double>(hits) / static_cast<double>(s.size());
}

}  // namespace lowbias
