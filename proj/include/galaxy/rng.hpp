#pragma once

#include <cstdint>
#include <random>

namespace galaxy {

/// Deterministic random stream. All randomized components take one of these
/// explicitly so that a campaign is a pure function of its seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Uniform on (0, hi]: rejects the zero draw.
    double uniform_positive(double hi) {
        double d = 0.0;
        do {
            d = uniform(0.0, hi);
        } while (d == 0.0);
        return d;
    }

    double normal(double mean, double stddev) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

    bool bernoulli(double p) {
        return std::bernoulli_distribution(p)(engine_);
    }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Derives an independent child stream; splitmix-style finalizer keeps
    /// consecutive draws from yielding correlated child seeds.
    Rng split() {
        std::uint64_t z = next_u64() + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace galaxy
