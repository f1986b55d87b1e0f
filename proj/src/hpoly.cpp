#include "lowbias/hpoly.hpp"

#include <stdexcept>

#include "lowbias/derivatives.hpp"

namespace lowbias {

HPoly HPoly::constant(double c) {
    HPoly p;
    if (c != 0.0) p.terms_[{0, 0, 0, 0}] = c;
    return p;
}

HPoly HPoly::var(int v, int power) {
    if (v < 0 || v >= kMaxVars) throw std::invalid_argument("HPoly variable out of range");
    HPoly p;
    Key k{0, 0, 0, 0};
    k[static_cast<size_t>(v)] = power;
    p.terms_[k] = 1.0;
    return p;
}

HPoly& HPoly::operator+=(const HPoly& o) {
    for (const auto& [k, c] : o.terms_) {
        double& slot = terms_[k];
        slot += c;
        if (slot == 0.0) terms_.erase(k);
    }
    return *this;
}

HPoly HPoly::operator+(const HPoly& o) const {
    HPoly r = *this;
    r += o;
    return r;
}

HPoly HPoly::operator-(const HPoly& o) const { return *this + o * -1.0; }

HPoly HPoly::operator*(const HPoly& o) const {
    HPoly r;
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_) {
            Key k;
            for (size_t i = 0; i < kMaxVars; ++i) k[i] = ka[i] + kb[i];
            double& slot = r.terms_[k];
            slot += ca * cb;
            if (slot == 0.0) r.terms_.erase(k);
        }
    return r;
}

HPoly HPoly::operator*(double c) const {
    HPoly r;
    if (c == 0.0) return r;
    for (const auto& [k, v] : terms_) r.terms_[k] = v * c;
    return r;
}

double HPoly::integrate(const MomentSet& m) const {
    double total = 0.0;
    for (const auto& [k, c] : terms_) {
        double factor = c;
        for (size_t i = 0; i < kMaxVars; ++i)
            if (k[i] > 0) factor *= m.mu(k[i]);
        total += factor;
    }
    return total;
}

HPoly mu_r_derivative_poly(int r, std::span<const int> mult, const MomentSet& m) {
    if (r < 2) throw std::invalid_argument("mu_r derivative needs r >= 2");
    int p = 0;
    for (int c : mult) p += c;
    if (p < 1) throw std::invalid_argument("derivative needs at least one argument");
    if (p > r) return HPoly();

    double sign = (p % 2 == 0) ? 1.0 : -1.0;
    double fp = falling_factorial(r, p);
    double fp1 = falling_factorial(r, p - 1);

    HPoly all = HPoly::constant(1.0);
    for (size_t v = 0; v < mult.size(); ++v)
        if (mult[v] > 0) all = all * HPoly::var(static_cast<int>(v), mult[v]);

    HPoly acc = all * (fp * m.mu(r - p));
    for (size_t v = 0; v < mult.size(); ++v) {
        if (mult[v] == 0) continue;
        // m_v copies of the slot term (h_v^{r-p+1} - mu_{r-p+1}) h_v^{m_v - 1} prod_{u != v} h_u^{m_u}
        HPoly rest = HPoly::constant(1.0);
        for (size_t u = 0; u < mult.size(); ++u) {
            if (mult[u] == 0) continue;
            int pow = (u == v) ? mult[u] - 1 : mult[u];
            if (pow > 0) rest = rest * HPoly::var(static_cast<int>(u), pow);
        }
        HPoly head = HPoly::var(static_cast<int>(v), r - p + 1) - HPoly::constant(m.mu(r - p + 1));
        acc += (head * rest) * (-fp1 * mult[v]);
    }
    return acc * sign;
}

}  // namespace lowbias
