#pragma once

#include <functional>
#include <vector>

#include "lowbias/discrete.hpp"
#include "lowbias/sample.hpp"

namespace lowbias {

using SampleStatistic = std::function<double(const Sample&)>;

// Number of count-vectors the oracle would enumerate: C(n+m-1, m-1).
double composition_count(int n, int atom_count);

/// Exact E T(F-hat) for samples of size n from a finite distribution,
/// by summing the statistic over every multinomial count-vector. Exact up
/// to floating point; the multinomial weights are formed in log space.
/// Enumeration is capped at 1e6 compositions.
double exact_expectation(const SampleStatistic& statistic, const DiscreteDistribution& dist,
                         int n);

// Two independent samples (for functionals of several distributions).
double exact_expectation_two(
    const std::function<double(const Sample&, const Sample&)>& statistic,
    const DiscreteDistribution& dist1, const DiscreteDistribution& dist2, int n1, int n2);

struct BiasPoint {
    int n = 0;
    double bias = 0;
};

// Exact biases of a statistic family indexed by the sample size.
std::vector<BiasPoint> exact_bias_curve(const std::function<SampleStatistic(int)>& family,
                                        const DiscreteDistribution& dist, int n_lo, int n_hi,
                                        double truth);

// sup over the curve of |bias| n^p, for order verification.
double sup_scaled_bias(const std::vector<BiasPoint>& curve, int p);

}  // namespace lowbias
