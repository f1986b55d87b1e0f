#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace lowbias {

/// A fixed sample of n observations in R^d, stored row-wise.
/// Observations are immutable after construction; all statistics in this
/// library are plug-in statistics of the empirical distribution of such
/// a sample.
class Sample {
public:
    explicit Sample(Eigen::MatrixXd observations);
    static Sample univariate(Eigen::VectorXd x);

    Eigen::Index size() const { return obs_.rows(); }
    Eigen::Index dim() const { return obs_.cols(); }

    const Eigen::MatrixXd& data() const { return obs_; }
    // Column view; the univariate case is column(0).
    Eigen::VectorXd column(Eigen::Index j) const { return obs_.col(j); }
    Eigen::VectorXd scalars() const;  // requires dim() == 1

private:
    Eigen::MatrixXd obs_;
};

/// k independent samples together with the weights lambda_a = n / n_a,
/// where n is the minimum sample size. min lambda_a == 1 by construction.
class MultiSample {
public:
    explicit MultiSample(std::vector<Sample> samples);

    int count() const { return static_cast<int>(samples_.size()); }
    const Sample& sample(int a) const { return samples_.at(a); }
    double lambda(int a) const { return lambdas_.at(a); }
    const std::vector<double>& lambdas() const { return lambdas_; }
    Eigen::Index min_size() const { return min_size_; }

private:
    std::vector<Sample> samples_;
    std::vector<double> lambdas_;
    Eigen::Index min_size_;
};

// Reads whitespace- or comma-delimited numeric text, one observation per
// line, d columns. Blank lines and lines starting with '#' are skipped.
Sample read_sample(std::istream& in);
Sample read_sample_file(const std::string& path);

}  // namespace lowbias
