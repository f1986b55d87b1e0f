#pragma once

#include <array>
#include <map>
#include <span>

#include "lowbias/moments.hpp"

namespace lowbias {

/// Polynomial in up to four centered variables h_x = x - mean, with
/// numeric coefficients. Products of functional derivatives of central
/// moments are polynomials of this kind, so expectations of such products
/// over independent copies reduce to sums of central-moment products:
/// E h_x^a h_y^b = mu_a mu_b. Used to integrate derivative products
/// exactly without quadrature.
class HPoly {
public:
    static constexpr int kMaxVars = 4;
    using Key = std::array<int, kMaxVars>;

    HPoly() = default;
    static HPoly constant(double c);
    static HPoly var(int v, int power = 1);

    HPoly& operator+=(const HPoly& o);
    HPoly operator+(const HPoly& o) const;
    HPoly operator-(const HPoly& o) const;
    HPoly operator*(const HPoly& o) const;
    HPoly operator*(double c) const;

    // Expectation over independent variables, each centered at F's mean.
    double integrate(const MomentSet& m) const;

    bool empty() const { return terms_.empty(); }

private:
    std::map<Key, double> terms_;
};

// The derivative of mu_r evaluated at repeated formal variables: slot
// multiplicities give how many of the p arguments equal each variable.
// Zero when the total argument count exceeds r.
HPoly mu_r_derivative_poly(int r, std::span<const int> multiplicities, const MomentSet& m);

}  // namespace lowbias
