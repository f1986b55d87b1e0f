#include "lowbias/derivatives.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lowbias/errors.hpp"

namespace lowbias {

double falling_factorial(double x, int k) {
    if (k < 0) throw std::invalid_argument("falling factorial needs k >= 0");
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= (x - i);
    return v;
}

double mu_r_derivative(int r, std::span<const double> points, const MomentSet& m) {
    if (r < 2) throw std::invalid_argument("mu_r derivative needs r >= 2");
    int p = static_cast<int>(points.size());
    if (p < 1) throw std::invalid_argument("derivative needs at least one point");
    if (p > r) return 0.0;  // mu_r is a polynomial functional of degree r

    std::vector<double> h(points.size());
    for (size_t i = 0; i < points.size(); ++i) h[i] = points[i] - m.mean();

    double prod = 1.0;
    for (double hi : h) prod *= hi;

    // Slot sum in cancelled form: (h_i^{r-p+1} - mu_{r-p+1}) prod_{j != i} h_j,
    // so h_i = 0 is a regular point.
    double slot_sum = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        double rest = 1.0;
        for (size_t j = 0; j < h.size(); ++j)
            if (j != i) rest *= h[j];
        slot_sum += (std::pow(h[i], r - p + 1) - m.mu(r - p + 1)) * rest;
    }

    double sign = (p % 2 == 0) ? 1.0 : -1.0;
    return sign * (falling_factorial(r, p) * m.mu(r - p) * prod -
                   falling_factorial(r, p - 1) * slot_sum);
}

namespace {

// sum over the p like terms of (h_i^k - mu_k) prod_{j != i} h_j
double sym_sum(const std::vector<double>& h, int k, double mu_k) {
    double s = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        double rest = 1.0;
        for (size_t j = 0; j < h.size(); ++j)
            if (j != i) rest *= h[j];
        s += (std::pow(h[i], k) - mu_k) * rest;
    }
    return s;
}

}  // namespace

double mu_r_derivative_tabulated(int r, std::span<const double> points, const MomentSet& m) {
    int p = static_cast<int>(points.size());
    if (r < 2 || r > 6 || p < 1 || p > r)
        throw std::invalid_argument("tabulated derivatives cover 1 <= p <= r <= 6");
    std::vector<double> h(points.size());
    for (size_t i = 0; i < points.size(); ++i) h[i] = points[i] - m.mean();
    double prod = 1.0;
    for (double hi : h) prod *= hi;

    switch (r) {
        case 2:
            if (p == 1) return h[0] * h[0] - m.mu(2);
            return -2.0 * h[0] * h[1];
        case 3:
            if (p == 1) return std::pow(h[0], 3) - m.mu(3) - 3.0 * h[0] * m.mu(2);
            if (p == 2) return -3.0 * (h[0] * h[0] - m.mu(2)) * h[1] - 3.0 * h[0] * (h[1] * h[1] - m.mu(2));
            return 12.0 * prod;
        case 4:
            if (p == 1) return std::pow(h[0], 4) - m.mu(4) - 4.0 * h[0] * m.mu(3);
            if (p == 2)
                return 12.0 * h[0] * h[1] * m.mu(2) - 4.0 * (std::pow(h[0], 3) - m.mu(3)) * h[1] -
                       4.0 * h[0] * (std::pow(h[1], 3) - m.mu(3));
            if (p == 3) return 12.0 * sym_sum(h, 2, m.mu(2));
            return -72.0 * prod;
        case 5:
            if (p == 1) return std::pow(h[0], 5) - m.mu(5) - 5.0 * h[0] * m.mu(4);
            if (p == 2)
                return 20.0 * h[0] * h[1] * m.mu(3) - 5.0 * (std::pow(h[0], 4) - m.mu(4)) * h[1] -
                       5.0 * h[0] * (std::pow(h[1], 4) - m.mu(4));
            if (p == 3) return -60.0 * prod * m.mu(2) + 20.0 * sym_sum(h, 3, m.mu(3));
            if (p == 4) return -60.0 * sym_sum(h, 2, m.mu(2));
            return 480.0 * prod;
        default:  // r == 6
            if (p == 1) return std::pow(h[0], 6) - m.mu(6) - 6.0 * h[0] * m.mu(5);
            if (p == 2)
                return 30.0 * h[0] * h[1] * m.mu(4) - 6.0 * (std::pow(h[0], 5) - m.mu(5)) * h[1] -
                       6.0 * h[0] * (std::pow(h[1], 5) - m.mu(5));
            if (p == 3) return -120.0 * prod * m.mu(3) + 30.0 * sym_sum(h, 4, m.mu(4));
            if (p == 4) return 120.0 * (3.0 * prod * m.mu(2) - sym_sum(h, 3, m.mu(3)));
            if (p == 5) return 360.0 * sym_sum(h, 2, m.mu(2));
            return -3600.0 * prod;  // (-1)^{r-1} (r-1) r! at r = 6
    }
}

double mu_r_bracket(int r, std::span<const int> partition, const MomentSet& m) {
    if (r < 2) throw std::invalid_argument("mu_r bracket needs r >= 2");
    if (partition.empty()) throw std::invalid_argument("empty partition");
    int q = 0;
    for (int b : partition) {
        if (b < 1) throw std::invalid_argument("partition blocks must be >= 1");
        q += b;
    }
    if (q > r) return 0.0;

    double prod_all = 1.0;
    for (int b : partition) prod_all *= m.mu(b);

    double block_sum = 0.0;
    for (size_t idx = 0; idx < partition.size(); ++idx) {
        double rest = 1.0;
        for (size_t j = 0; j < partition.size(); ++j)
            if (j != idx) rest *= m.mu(partition[j]);
        int b = partition[idx];
        block_sum += b * (m.mu(r - q + b) - m.mu(r - q + 1) * m.mu(b - 1)) * rest;
    }

    double sign = (q % 2 == 0) ? 1.0 : -1.0;
    return sign * (falling_factorial(r, q) * m.mu(r - q) * prod_all -
                   falling_factorial(r, q - 1) * block_sum);
}

double bracket_pair(int i, int j, const MomentSet& m) {
    return i * j * m.mu(i - 1) * m.mu(j - 1) * m.mu(2) -
           (i * m.mu(i - 1) * m.mu(j + 1) + j * m.mu(j - 1) * m.mu(i + 1)) + m.mu(i + j) -
           m.mu(i) * m.mu(j);
}

double bracket_triple(int i, int j, int k, const MomentSet& m) {
    auto cyc = [&](auto f) { return f(i, j, k) + f(j, k, i) + f(k, i, j); };
    double v = -static_cast<double>(i) * j * k * m.mu(i - 1) * m.mu(j - 1) * m.mu(k - 1) * m.mu(3);
    v += cyc([&](int a, int b, int c) {
        return a * b * m.mu(a - 1) * m.mu(b - 1) * (m.mu(c + 2) - m.mu(c) * m.mu(2));
    });
    v -= cyc([&](int a, int b, int c) {
        return a * m.mu(a - 1) *
               (m.mu(b + c + 1) - m.mu(b + 1) * m.mu(c) - m.mu(c + 1) * m.mu(b));
    });
    v += m.mu(i + j + k);
    v -= cyc([&](int a, int b, int c) { return m.mu(a) * m.mu(b + c); });
    v += 2.0 * m.mu(i) * m.mu(j) * m.mu(k);
    return v;
}

double bracket_21(int i, int j, const MomentSet& m) {
    double i2 = falling_factorial(i, 2);
    return -i2 * j * m.mu(i - 2) * m.mu(j - 1) * m.mu(3) +
           i2 * m.mu(i - 2) * (m.mu(j + 2) - m.mu(j) * m.mu(2)) +
           2.0 * i * j * m.mu(j - 1) * (m.mu(i + 1) - m.mu(i - 1) * m.mu(2)) -
           2.0 * i * (m.mu(i + j) - m.mu(i) * m.mu(j) - m.mu(i - 1) * m.mu(j + 1));
}

double bracket_1_122(int i, int j, const MomentSet& m) {
    double j2 = falling_factorial(j, 2);
    double j3 = falling_factorial(j, 3);
    return j2 * ((-3.0 * i * m.mu(i - 1) * m.mu(j - 1) + m.mu(i + j - 2) - m.mu(i) * m.mu(j - 2)) *
                     m.mu(2) +
                 2.0 * m.mu(i + 1) * m.mu(j - 1)) +
           j3 * (i * m.mu(i - 1) * m.mu(j - 3) * m.mu(2) * m.mu(2) -
                 m.mu(j - 3) * m.mu(i + 1) * m.mu(2));
}

double bracket_1212(int i, int j, const MomentSet& m) {
    double i2 = falling_factorial(i, 2);
    double j2 = falling_factorial(j, 2);
    return i2 * j2 * m.mu(i - 2) * m.mu(j - 2) * m.mu(2) * m.mu(2) -
           2.0 * (i * j2 * m.mu(i) * m.mu(j - 2) + j * i2 * m.mu(j) * m.mu(i - 2)) * m.mu(2) +
           2.0 * i * j *
               (m.mu(i + j - 2) * m.mu(2) - m.mu(i - 1) * m.mu(j - 1) * m.mu(2) +
                m.mu(i) * m.mu(j));
}

double bracket_12_1_2(int i, int j, int k, const MomentSet& m) {
    auto a = [&](int t) { return m.mu(t + 1) - t * m.mu(t - 1) * m.mu(2); };
    auto b = [&](int s, int t) {
        return m.mu(s + t - 1) - t * m.mu(t - 1) * m.mu(s) - m.mu(s - 1) * m.mu(t);
    };
    return falling_factorial(i, 2) * m.mu(i - 2) * a(j) * a(k) -
           i * (b(i, j) * a(k) + b(i, k) * a(j));
}

double bracket_g(int i, int j, int k, const MomentSet& m) {
    int p2[] = {2};
    return 2.0 * bracket_pair(i, j, m) * mu_r_bracket(k, p2, m) +
           4.0 * bracket_12_1_2(i, j, k, m);
}

double bracket_h(int i, int j, const MomentSet& m) {
    int p2[] = {2};
    return 4.0 * bracket_1_122(i, j, m) +
           mu_r_bracket(i, p2, m) * mu_r_bracket(j, p2, m) + 2.0 * bracket_1212(i, j, m);
}

}  // namespace lowbias
