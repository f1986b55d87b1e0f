#include "lowbias/corrections.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lowbias/errors.hpp"

namespace lowbias {

bool DerivativeBundle::has_core() const {
    return t2 && t3 && t4 && t22 && t23 && t222;
}

bool DerivativeBundle::has_extended() const {
    return t5 && t24 && t33 && t223 && t2222;
}

DerivativeBundle DerivativeBundle::zero() {
    DerivativeBundle b;
    b.t2 = b.t3 = b.t4 = b.t22 = b.t23 = b.t222 = 0.0;
    return b;
}

DerivativeBundle DerivativeBundle::zero_extended() {
    DerivativeBundle b = zero();
    b.t5 = b.t24 = b.t33 = b.t223 = b.t2222 = 0.0;
    return b;
}

double DerivativeBundle::v(const std::optional<double>& field, const char* name) const {
    if (!field) throw unavailable_error(name);
    return *field;
}

MultiBundle::MultiBundle(int sample_count) : k_(sample_count) {
    if (sample_count < 1) throw std::invalid_argument("need at least one sample");
}

namespace {

MultiBundle::Blocks canonical_blocks(MultiBundle::Blocks blocks, int k) {
    for (auto& [tag, power] : blocks) {
        if (tag < 0 || tag >= k) throw std::invalid_argument("sample tag out of range");
        if (power < 2) throw std::invalid_argument("block powers are >= 2");
    }
    std::sort(blocks.begin(), blocks.end());
    return blocks;
}

std::string blocks_name(const MultiBundle::Blocks& blocks) {
    std::string s = "T(";
    for (const auto& [tag, power] : blocks)
        s += static_cast<char>('a' + tag) + ("^" + std::to_string(power) + " ");
    if (s.back() == ' ') s.pop_back();
    return s + ")";
}

}  // namespace

void MultiBundle::set(Blocks blocks, double value) {
    values_[canonical_blocks(std::move(blocks), k_)] = value;
}

bool MultiBundle::has(Blocks blocks) const {
    return values_.count(canonical_blocks(std::move(blocks), k_)) > 0;
}

double MultiBundle::get(Blocks blocks) const {
    Blocks key = canonical_blocks(std::move(blocks), k_);
    auto it = values_.find(key);
    if (it == values_.end()) throw unavailable_error(blocks_name(key));
    return it->second;
}

BiasCoefficients bias_coeffs_one_sample(const DerivativeBundle& b, bool with_c4) {
    BiasCoefficients c;
    c.c1 = b.v2() / 2.0;
    c.c2 = b.v3() / 6.0 + b.v22() / 8.0;
    c.c3 = (b.v4() - 3.0 * b.v22()) / 24.0 + b.v23() / 12.0 + b.v222() / 48.0;
    if (with_c4) {
        double m5 = b.v(b.t5, "T(1^5)") - 10.0 * b.v23();
        double m24 = b.v(b.t24, "T(1^2 1^4)") - 3.0 * b.v222();
        c.c4 = m5 / 120.0 + m24 / 48.0 + b.v(b.t33, "T(1^3 1^3)") / 72.0 +
               b.v(b.t223, "T(1^2 1^2 1^3)") / 48.0 + b.v(b.t2222, "T(1^2 1^2 1^2 1^2)") / 384.0;
    }
    return c;
}

CorrectionSeries corrections_one_sample(double base, const DerivativeBundle& b) {
    CorrectionSeries s;
    s.base = base;
    s.scheme = WeightScheme::PowerOfN;
    s.terms = {
        -b.v2() / 2.0,
        b.v3() / 3.0 + b.v22() / 8.0 - b.v2() / 2.0,
        -b.v2() / 2.0 + b.v3() - b.v4() / 4.0 + 3.0 * b.v22() / 4.0 - b.v23() / 6.0 -
            b.v222() / 48.0,
    };
    return s;
}

namespace {

// |x - y| <= tol * max(1, |x|, |y|)
bool close_rel(double x, double y, double tol) {
    return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

CorrectionSeries simpler_one_sample(double base, const DerivativeBundle& b) {
    CorrectionSeries s;
    s.base = base;
    s.scheme = WeightScheme::FallingFactorial;
    s.terms = {
        -b.v2() / 2.0,
        b.v3() / 3.0 + b.v22() / 8.0,
        -b.v4() / 4.0 + 3.0 * b.v22() / 8.0 - b.v23() / 6.0 - b.v222() / 48.0,
    };
    // must agree with the conversion from the T-family
    CorrectionSeries t = corrections_one_sample(base, b);
    if (!close_rel(s.terms[0], t.terms[0], 1e-12) ||
        !close_rel(s.terms[1], t.terms[1] - t.terms[0], 1e-12) ||
        !close_rel(s.terms[2], t.terms[2] - 3.0 * t.terms[1] + 2.0 * t.terms[0], 1e-12))
        throw std::logic_error("S/T conversion identity violated");
    return s;
}

namespace {

struct MultiTerms {
    double t1 = 0, t2 = 0, t3 = 0;
    double c1 = 0, c2 = 0, c3 = 0;
};

MultiTerms multisample_terms(const MultiBundle& b, std::span<const double> lambdas) {
    int k = b.sample_count();
    if (static_cast<int>(lambdas.size()) != k)
        throw std::invalid_argument("lambda count must match sample count");
    const auto L = [&](int a) { return lambdas[static_cast<size_t>(a)]; };

    double s2 = 0, s3 = 0, s4m = 0, s2sq = 0, s2cu = 0;   // |2|, |3|, |4|, |2^2|, |2^3|
    double s23 = 0, t2_l2 = 0, t2_l3 = 0;                 // |23|, sum l^2 T(a^2), sum l^3 T(a^2)
    double t3_a3 = 0, t3_a4 = 0, t3_a22 = 0, t22_l12 = 0, t23_l12 = 0;
    for (int a = 0; a < k; ++a) {
        double ta2 = b.get({{a, 2}});
        s2 += L(a) * ta2;
        t2_l2 += L(a) * L(a) * ta2;
        t2_l3 += L(a) * L(a) * L(a) * ta2;
        double ta3 = b.get({{a, 3}});
        s3 += L(a) * L(a) * ta3;
        t3_a3 += L(a) * L(a) * L(a) * ta3;
        double la3 = L(a) * L(a) * L(a);
        s4m += la3 * (b.get({{a, 4}}) - 3.0 * b.get({{a, 2}, {a, 2}}));
        t3_a4 += la3 * b.get({{a, 4}});
        t3_a22 += la3 * b.get({{a, 2}, {a, 2}});
    }
    for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c) {
            s2sq += L(a) * L(c) * b.get({{a, 2}, {c, 2}});
            s23 += L(a) * L(c) * L(c) * b.get({{a, 2}, {c, 3}});
            t22_l12 += L(a) * L(c) * L(c) * b.get({{a, 2}, {c, 2}});
            t23_l12 += L(a) * L(c) * L(c) * b.get({{a, 2}, {c, 3}});
        }
    for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c)
            for (int e = 0; e < k; ++e)
                s2cu += L(a) * L(c) * L(e) * b.get({{a, 2}, {c, 2}, {e, 2}});

    MultiTerms out;
    out.c1 = s2 / 2.0;
    out.c2 = s3 / 6.0 + s2sq / 8.0;
    out.c3 = s4m / 24.0 + s23 / 12.0 + s2cu / 48.0;
    out.t1 = -s2 / 2.0;
    out.t2 = s3 / 3.0 + s2sq / 8.0 - t2_l2 / 2.0;
    out.t3 = -t2_l3 / 2.0 + t3_a3 - t3_a4 / 4.0 + t3_a22 / 2.0 + t22_l12 / 4.0 - t23_l12 / 6.0 -
             s2cu / 48.0;
    return out;
}

}  // namespace

BiasCoefficients bias_coeffs_multisample(const MultiBundle& b, std::span<const double> lambdas) {
    MultiTerms t = multisample_terms(b, lambdas);
    BiasCoefficients c;
    c.c1 = t.c1;
    c.c2 = t.c2;
    c.c3 = t.c3;
    return c;
}

CorrectionSeries corrections_multisample(double base, const MultiBundle& b,
                                         std::span<const double> lambdas) {
    MultiTerms t = multisample_terms(b, lambdas);
    CorrectionSeries s;
    s.base = base;
    s.scheme = WeightScheme::PowerOfN;
    s.terms = {t.t1, t.t2, t.t3};
    return s;
}

CorrectionSeries simpler_multisample(double base, const MultiBundle& b,
                                     std::span<const double> lambdas) {
    MultiTerms t = multisample_terms(b, lambdas);
    CorrectionSeries s;
    s.base = base;
    s.scheme = WeightScheme::FallingFactorial;
    s.terms = {t.t1, t.t2 - t.t1, t.t3 - 3.0 * t.t2 + 2.0 * t.t1};
    return s;
}

double CorrectionSeries::weight(double n, int i) const {
    if (i == 0) return 1.0;
    switch (scheme) {
        case WeightScheme::PowerOfN:
            return std::pow(n, -i);
        case WeightScheme::FallingFactorial: {
            double d = 1.0;
            for (int j = 1; j <= i; ++j) d *= (n - j);
            if (d == 0.0) throw std::invalid_argument("falling-factorial weight vanishes");
            return 1.0 / d;
        }
        case WeightScheme::Custom:
            if (i > static_cast<int>(custom_weights.size()))
                throw unavailable_error("custom weight N_" + std::to_string(i));
            return custom_weights[static_cast<size_t>(i - 1)];
    }
    throw std::invalid_argument("unknown weight scheme");
}

double assemble_estimate(const CorrectionSeries& series, double n, int p) {
    if (p < 1 || p > 4) throw std::invalid_argument("order p must be in 1..4");
    if (n < p) throw std::invalid_argument("sample size must satisfy n >= p");
    if (series.scheme == WeightScheme::FallingFactorial && n <= p - 1)
        throw std::invalid_argument("falling-factorial weights need n > p-1");
    if (p - 1 > static_cast<int>(series.terms.size()))
        throw unavailable_error("correction term " + std::to_string(p - 1));
    double value = series.base;
    for (int i = 1; i < p; ++i)
        value += series.weight(n, i) * series.terms[static_cast<size_t>(i - 1)];
    return value;
}

double truncated_estimate(double corrected, double plugin_value, double u, double c) {
    if (!(u > 0.0)) throw std::invalid_argument("truncation bound u must be positive");
    return std::abs(plugin_value) < u ? corrected : c;
}

PlusEstimate plus_estimate(const CorrectionSeries& series, double n, int p) {
    if (p < 1 || p > 4) throw std::invalid_argument("order p must be in 1..4");
    int max_terms = std::min(p - 1, static_cast<int>(series.terms.size()));
    int q = 1;
    double prev = std::abs(series.base);
    while (q <= max_terms) {
        double cur = std::abs(series.weight(n, q) * series.terms[static_cast<size_t>(q - 1)]);
        if (cur >= prev) break;  // ties stop the sequence
        prev = cur;
        ++q;
    }
    return {assemble_estimate(series, n, q), q};
}

double nested_estimate(std::span<const CorrectionSeries> u_series, double n, int p) {
    if (p < 1 || p > 4) throw std::invalid_argument("order p must be in 1..4");
    if (static_cast<int>(u_series.size()) < p)
        throw std::invalid_argument("need series U_0..U_{p-1}");
    double value = 0.0;
    for (int i = 0; i < p; ++i)
        value += std::pow(n, -i) * assemble_estimate(u_series[static_cast<size_t>(i)], n, p - i);
    return value;
}

double ue_matrix_d(int i, int p) {
    if (i < 0 || p < 1) throw std::invalid_argument("bad D_i(p) arguments");
    // elementary symmetric polynomial e_i(1..p-1) via the product recurrence
    std::vector<double> e(static_cast<size_t>(i) + 1, 0.0);
    e[0] = 1.0;
    for (int m = 1; m <= p - 1; ++m)
        for (int j = std::min<int>(i, m); j >= 1; --j)
            e[static_cast<size_t>(j)] += m * e[static_cast<size_t>(j - 1)];
    return e[static_cast<size_t>(i)];
}

UeMatrixResult ue_matrix(const UeMatrixProblem& problem) {
    int p = problem.degree;
    if (p < 2) throw std::invalid_argument("matrix method needs degree >= 2");
    Eigen::Index d = problem.a1.rows();
    if (problem.a1.cols() != d || problem.a2.rows() != d || problem.a2.cols() != d)
        throw std::invalid_argument("A matrices must be square and of equal size");

    UeMatrixResult out;
    out.degree = p;
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    int half = p / 2;
    out.b.push_back(id);
    if (half >= 1) out.b.push_back(-ue_matrix_d(1, p) * id - problem.a1);
    if (half >= 2)
        out.b.push_back(ue_matrix_d(2, p) * id + ue_matrix_d(1, p) * problem.a1 - problem.a2 +
                        problem.a1 * problem.a1);
    if (half >= 3) {
        if (!problem.a3) throw unavailable_error("A_3 (needed for B_3)");
        const Eigen::MatrixXd& a3 = *problem.a3;
        out.b.push_back(-ue_matrix_d(3, p) * id - ue_matrix_d(2, p) * problem.a1 -
                        ue_matrix_d(1, p) * (-problem.a2 + problem.a1 * problem.a1) - a3 +
                        problem.a1 * problem.a2 + problem.a2 * problem.a1 -
                        problem.a1 * problem.a1 * problem.a1);
    }
    return out;
}

Eigen::VectorXd UeMatrixResult::evaluate(const Eigen::VectorXd& plugin, double n) const {
    if (n <= degree - 1) throw std::invalid_argument("matrix UE needs n > p-1");
    Eigen::VectorXd numerator = Eigen::VectorXd::Zero(plugin.size());
    for (size_t i = 0; i < b.size(); ++i)
        numerator += std::pow(n, -static_cast<double>(i)) * (b[i] * plugin);
    double denom = 1.0;
    for (int i = 1; i <= degree - 1; ++i) denom *= (1.0 - i / n);
    return numerator / denom;
}

std::vector<double> polynomial_ue_coefficients(std::span<const double> t_terms, int r) {
    if (r < 2) throw std::invalid_argument("degree must be >= 2");
    // a_i = sum_{j<=i} (-1)^{i-j} e_{i-j}(1..r-1) T_j
    std::vector<double> a(t_terms.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        double acc = 0.0;
        for (size_t j = 0; j <= i; ++j) {
            double e = ue_matrix_d(static_cast<int>(i - j), r);
            double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            acc += sign * e * t_terms[j];
        }
        a[i] = acc;
    }
    return a;
}

double polynomial_ue_evaluate(std::span<const double> coeffs, int r, double n) {
    if (n <= r - 1) throw std::invalid_argument("unbiased form needs n > r-1");
    double numerator = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i)
        numerator += coeffs[i] * std::pow(n, -static_cast<double>(i));
    double denom = 1.0;
    for (int i = 1; i <= r - 1; ++i) denom *= (1.0 - i / n);
    return numerator / denom;
}

}  // namespace lowbias
