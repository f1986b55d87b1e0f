#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lowbias/moments.hpp"

namespace lowbias {

/// Symmetric partial derivatives g_{i j ...} of g(s_1..s_q) evaluated at
/// s = S(F). Orders must be declared before use: entries of a declared
/// order default to zero, while an undeclared order is an error, never a
/// silent zero.
class PartialDerivativeTable {
public:
    explicit PartialDerivativeTable(int slots);

    int slots() const { return q_; }
    void provide_order(int order);
    bool has_order(int order) const { return orders_.count(order) > 0; }
    // index values are 1-based statistic slots; stored under sorted key
    void set(std::vector<int> index, double value);
    double get(std::vector<int> index) const;

private:
    int q_;
    std::set<int> orders_;
    std::map<std::vector<int>, double> g_;
};

/// Integrated products of derivatives of the statistics S_1..S_q. One
/// entry is a product of factors S_{i}(word), where the word lists how
/// many of the factor's arguments equal each integration variable; shared
/// variables couple factors inside one integral. Values are stored under
/// a canonical form that is invariant under relabeling of the variables
/// (all variables range over the same distribution here).
class SDerivativeMoments {
public:
    struct Factor {
        int index;             // statistic slot, 1-based
        std::vector<int> arg;  // multiplicity of each integration variable
    };
    // Optional fallback used when an entry was not registered explicitly;
    // returning nullopt keeps the entry unavailable.
    using Generator = std::function<std::optional<double>(const std::vector<Factor>&)>;

    explicit SDerivativeMoments(int slots, Generator gen = nullptr);

    int slots() const { return q_; }
    void set(const std::vector<Factor>& factors, double value);
    bool has(const std::vector<Factor>& factors) const;
    double get(const std::vector<Factor>& factors) const;

    static std::string canonical_key(const std::vector<Factor>& factors);

private:
    int q_;
    mutable std::map<std::string, double> values_;
    Generator gen_;
};

enum class BundlePattern { A2, A3, A4, A2B2, A2B3, A2B2C2 };

// Integrated derivative moment T(pattern) for T(F) = g(S(F)) by the
// multivariate chain rule, with the expansion of each pattern hard-coded
// term by term so every coefficient is auditable. Summation over repeated
// statistic indices runs over 1..q.
double chain_bundle(const PartialDerivativeTable& g, const SDerivativeMoments& s,
                    BundlePattern pattern);

// Generator for statistics that are central moments of one univariate
// distribution; orders[t] is the moment order of slot t+1, with order 1
// standing for the mean. Any requested factor product is integrated
// exactly as a polynomial in the centered variables.
SDerivativeMoments::Generator central_moment_smoments(std::vector<int> orders, MomentSet m);

}  // namespace lowbias
