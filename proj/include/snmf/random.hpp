#pragma once

// Seeded random variate generation. Every sampler is built on the raw 64-bit
// output of mt19937_64 so that draws are identical across standard libraries
// (the std:: distributions are implementation-defined).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace snmf {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); safe to take the log of.
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();

    /// Poisson variate: inversion for rate < 10, PTRS rejection above.
    std::int64_t poisson(double rate);

    /// log of a Gamma(shape, 1) variate. Working in log domain keeps
    /// shapes far below 1 (e.g. 0.02) from underflowing to exactly zero.
    double log_gamma_variate(double shape);
    /// Gamma(shape, rate) variate.
    double gamma(double shape, double rate);
    /// Dirichlet variate with the given concentration parameters.
    std::vector<double> dirichlet(std::span<const double> concentration);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

} // namespace snmf
