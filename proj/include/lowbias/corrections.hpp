#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lowbias {

/// Integrated derivative moments of one functional of a single sample.
/// The core keys feed the corrections up to third order; the extended
/// keys are needed only for the fourth bias coefficient. Missing entries
/// stay missing: reads of unset fields raise, they never read as zero.
struct DerivativeBundle {
    std::optional<double> t2, t3, t4, t22, t23, t222;        // T(1^2) .. T(1^2 1^2 1^2)
    std::optional<double> t5, t24, t33, t223, t2222;         // extended, for C_4

    bool has_core() const;
    bool has_extended() const;
    static DerivativeBundle zero();          // all core keys zero
    static DerivativeBundle zero_extended();

    double v(const std::optional<double>& field, const char* name) const;
    double v2() const { return v(t2, "T(1^2)"); }
    double v3() const { return v(t3, "T(1^3)"); }
    double v4() const { return v(t4, "T(1^4)"); }
    double v22() const { return v(t22, "T(1^2 1^2)"); }
    double v23() const { return v(t23, "T(1^2 1^3)"); }
    double v222() const { return v(t222, "T(1^2 1^2 1^2)"); }
};

/// Tagged derivative moments for a functional of several samples: each
/// block is (sample tag, argument multiplicity), e.g. {(0,2),(1,3)} is
/// T(a^2 b^3). Blocks with equal tags are distinct integrals from blocks
/// that merely repeat a power, so the key is the whole multiset.
class MultiBundle {
public:
    using Blocks = std::vector<std::pair<int, int>>;

    explicit MultiBundle(int sample_count);

    int sample_count() const { return k_; }
    void set(Blocks blocks, double value);
    bool has(Blocks blocks) const;
    double get(Blocks blocks) const;

private:
    int k_;
    std::map<Blocks, double> values_;
};

struct BiasCoefficients {
    double c1 = 0, c2 = 0, c3 = 0;
    std::optional<double> c4;
};

enum class WeightScheme { PowerOfN, FallingFactorial, Custom };

/// Ordered correction terms: estimate = N_0 base + sum_i N_i(n) terms[i-1]
/// with N_0 = 1. At most three terms are ever available.
struct CorrectionSeries {
    double base = 0.0;
    std::vector<double> terms;
    WeightScheme scheme = WeightScheme::PowerOfN;
    std::vector<double> custom_weights;  // N_1.., used with WeightScheme::Custom

    double weight(double n, int i) const;
};

// One-sample bias coefficients C_1..C_3 (and C_4 when the extended keys
// are present and requested).
BiasCoefficients bias_coeffs_one_sample(const DerivativeBundle& b, bool with_c4 = false);

// T-family corrections (weights n^-i) and the simpler S-family (weights
// 1/(n-1)_i). The S-series also satisfies S_1 = T_1, S_2 = T_2 - T_1,
// S_3 = T_3 - 3 T_2 + 2 T_1, which is asserted on construction.
CorrectionSeries corrections_one_sample(double base, const DerivativeBundle& b);
CorrectionSeries simpler_one_sample(double base, const DerivativeBundle& b);

// Multisample counterparts; lambdas[a] = n / n_a with min lambda == 1.
BiasCoefficients bias_coeffs_multisample(const MultiBundle& b, std::span<const double> lambdas);
CorrectionSeries corrections_multisample(double base, const MultiBundle& b,
                                         std::span<const double> lambdas);
CorrectionSeries simpler_multisample(double base, const MultiBundle& b,
                                     std::span<const double> lambdas);

// Assembled p-th order estimate, 1 <= p <= 4; requires n >= p and, under
// falling-factorial weights, n > p - 1.
double assemble_estimate(const CorrectionSeries& series, double n, int p);

// Gated estimate: the corrected value passes through only while the raw
// plug-in value stays inside the known bound u; outside it the constant c
// is returned.
double truncated_estimate(double corrected, double plugin_value, double u, double c);

struct PlusEstimate {
    double value = 0.0;
    int order = 0;  // q <= p actually used
};
// Stops the series at the last strictly decreasing |N_i(n) term_i|.
PlusEstimate plus_estimate(const CorrectionSeries& series, double n, int p);

// p-th order estimate of U_n(F) = sum_i n^-i U_i(F): each inner series is
// assembled to the order that keeps the total bias O(n^-p).
double nested_estimate(std::span<const CorrectionSeries> u_series, double n, int p);

/// Unbiased estimation of all moment products of one degree at once from
/// the first bias-coefficient matrices C_i = A_i T(F).
struct UeMatrixProblem {
    int degree = 0;  // p
    Eigen::MatrixXd a1, a2;
    std::optional<Eigen::MatrixXd> a3;
};

struct UeMatrixResult {
    int degree = 0;
    std::vector<Eigen::MatrixXd> b;  // B_0 .. B_[p/2]
    // { sum_i B_i n^-i } t_hat / prod_{i=1}^{p-1} (1 - i/n); needs n > p-1.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& plugin, double n) const;
};

UeMatrixResult ue_matrix(const UeMatrixProblem& problem);

// D_i(p): elementary symmetric polynomial of {1, .., p-1}.
double ue_matrix_d(int i, int p);

// Numerator coefficients a_0..a_s of the exactly unbiased form
// { sum a_i n^-i } / prod_{i=1}^{r-1} (1 - i/n) recovered from the
// correction terms T_0..T_s of a degree-r polynomial functional.
std::vector<double> polynomial_ue_coefficients(std::span<const double> t_terms, int r);
double polynomial_ue_evaluate(std::span<const double> coeffs, int r, double n);

}  // namespace lowbias
