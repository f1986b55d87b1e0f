#pragma once

#include <cstdint>

namespace lowbias {

// Derives the generator state for one replicate from the master seed, so
// results do not depend on how replicates are scheduled across workers.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// xoshiro256** seeded through splitmix64. Self-contained so that runs
/// are reproducible across compilers and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    double uniform();      // (0, 1)
    double normal();       // standard normal via the inverse d.f.
    double exponential();  // rate 1
    double gamma(double shape);

private:
    std::uint64_t s_[4];
};

// Inverse of the standard normal distribution function (double precision,
// relative error around 1e-16 away from the extreme tails).
double normal_quantile(double p);

}  // namespace lowbias
