#include "lowbias/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace lowbias {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t x = master ^ (0xa0761d6478bd642fULL * (index + 1));
    return splitmix64(x);
}

Rng::Rng(std::uint64_t seed) {
    for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Rng::next() {
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    // 53-bit mantissa, shifted off zero
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_quantile(uniform()); }

double Rng::exponential() { return -std::log(uniform()); }

double Rng::gamma(double shape) {
    if (shape <= 0.0) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        // boost to shape + 1, then scale back
        double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double normal_quantile(double p) {
    // Wichura's algorithm AS 241, double-precision branch.
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0,1)");
    double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                           6.7265770927008700853e4) *
                              r +
                          4.5921953931549871457e4) *
                             r +
                         1.3731693765509461125e4) *
                            r +
                        1.9715909503065514427e3) *
                           r +
                       1.3314166789178437745e2) *
                          r +
                      3.3871328727963666080e0);
        double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                           3.9307895800092710610e4) *
                              r +
                          2.1213794301586595867e4) *
                             r +
                         5.3941960214247511077e3) *
                            r +
                        6.8718700749205790830e2) *
                           r +
                       4.2313330701600911252e1) *
                          r +
                      1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                           2.41780725177450611770e-1) *
                              r +
                          1.27045825245236838258e0) *
                             r +
                         3.64784832476320460504e0) *
                            r +
                        5.76949722146069140550e0) *
                           r +
                       4.63033784615654529590e0) *
                          r +
                      1.42343711074968357734e0);
        double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                           1.51986665636164571966e-2) *
                              r +
                          1.48103976427480074590e-1) *
                             r +
                         6.89767334985100004550e-1) *
                            r +
                        1.67638483018380384940e0) *
                           r +
                       2.05319162663775882187e0) *
                          r +
                      1.0);
        value = num / den;
    } else {
        r -= 5.0;
        double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                           1.24266094738807843860e-3) *
                              r +
                          2.65321895265761230930e-2) *
                             r +
                         2.96560571828504891230e-1) *
                            r +
                        1.78482653991729133580e0) *
                           r +
                       5.46378491116411436990e0) *
                          r +
                      6.65790464350110377720e0);
        double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                           1.84631831751005468180e-5) *
                              r +
                          7.86869131145613259100e-4) *
                             r +
                         1.48753612908506148525e-2) *
                            r +
                        1.36929880922735805310e-1) *
                           r +
                       5.99832206555887937690e-1) *
                          r +
                      1.0);
        value = num / den;
    }
    return (q < 0.0) ? -value : value;
}

}  // namespace lowbias
