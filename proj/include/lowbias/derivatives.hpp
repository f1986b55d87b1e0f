#pragma once

#include <span>

#include "lowbias/moments.hpp"

namespace lowbias {

// (x)_k = x (x-1) ... (x-k+1) for real x.
double falling_factorial(double x, int k);

/// General functional derivative of the r-th central moment at the points
/// x_1..x_p, written with the removable singularity cancelled so that
/// points at the mean are regular. Identically zero for p > r.
double mu_r_derivative(int r, std::span<const double> points, const MomentSet& m);

/// Independently coded closed forms of the same derivatives for
/// 1 <= p <= r <= 6; serves as the oracle for mu_r_derivative.
double mu_r_derivative_tabulated(int r, std::span<const double> points, const MomentSet& m);

/// Integrated derivative of mu_r over repeated-argument blocks: the block
/// sizes are the partition entries, e.g. {2,3} is mu_r(1^2 1^3). Zero when
/// the total order exceeds r.
double mu_r_bracket(int r, std::span<const int> partition, const MomentSet& m);

// Closed-form bracket family for products of central moments. Each is an
// expectation of a product of mu-derivatives over one or two independent
// copies; definitions are verified against HPoly integration in the tests.
double bracket_pair(int i, int j, const MomentSet& m);            // E mu_i'(x) mu_j'(x)
double bracket_triple(int i, int j, int k, const MomentSet& m);   // E mu_i' mu_j' mu_k' (x)
double bracket_21(int i, int j, const MomentSet& m);              // E mu_i''(x,x) mu_j'(x)
double bracket_1_122(int i, int j, const MomentSet& m);           // EE mu_i'(x) mu_j'''(x,y,y)
double bracket_1212(int i, int j, const MomentSet& m);            // EE mu_i''(x,y) mu_j''(x,y)
double bracket_12_1_2(int i, int j, int k, const MomentSet& m);   // EE mu_i''(x,y) mu_j'(x) mu_k'(y)
double bracket_g(int i, int j, int k, const MomentSet& m);
double bracket_h(int i, int j, const MomentSet& m);

}  // namespace lowbias
