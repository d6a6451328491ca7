#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dsrcsim {

// Deterministic random stream for one replication.
//
// Every draw is derived from mt19937_64 through uniform01() rather than
// through std:: distributions, whose output is implementation-defined.
// Identical seed, identical draw sequence, on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // 53-bit uniform on [0, 1). Consumes exactly one engine step.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller without caching; consumes two engine steps.
    double normal(double mean, double stddev) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(2.0 * M_PI * u2);
    }

    // Multiplication method; adequate for the small per-step arrival means
    // used here (engine steps consumed varies with the draw).
    int poisson(double mean) {
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Replication r of a scenario draws from base_seed + r.
inline std::uint64_t replication_seed(std::uint64_t base_seed, int replication) {
    return base_seed + static_cast<std::uint64_t>(replication);
}

}  // namespace dsrcsim
