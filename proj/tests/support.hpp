#pragma once

// Independent reference computations and small fixtures shared by the unit
// tests and the acceptance runner. Nothing here calls into the library's
// numerical routines; the oracles are brute-force sums in long double.

#include "snmf/data.hpp"
#include "snmf/model.hpp"
#include "snmf/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace snmf::testing {

inline long double poisson_log_pmf_ld(std::int64_t n, long double rate) {
    if (n < 0) {
        return -std::numeric_limits<long double>::infinity();
    }
    if (rate == 0.0L) {
        return n == 0 ? 0.0L : -std::numeric_limits<long double>::infinity();
    }
    return -rate + n * std::log(rate) - std::lgamma(static_cast<long double>(n) + 1.0L);
}

/// ln P(X0 - X1 = x) by summing the Poisson convolution over X1 = 0..terms.
inline double skellam_convolution_log_pmf(std::int64_t x, double l0, double l1, int terms = 200) {
    long double total = 0.0L;
    for (std::int64_t n1 = 0; n1 <= terms; ++n1) {
        const std::int64_t n0 = x + n1;
        if (n0 < 0) {
            continue;
        }
        total += std::exp(poisson_log_pmf_ld(n0, l0) + poisson_log_pmf_ld(n1, l1));
    }
    return static_cast<double>(std::log(total));
}

/// ln 0F1(; b; z) from the first `terms` terms of the power series.
inline double log_0F1_series(double b, double z, int terms = 200) {
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 0; k < terms; ++k) {
        term *= static_cast<long double>(z) / ((k + 1.0L) * (b + k));
        sum += term;
    }
    return static_cast<double>(std::log(sum));
}

/// I_nu(z) from its power series; only for moderate z.
inline long double bessel_i_series(long double nu, long double z, int terms = 120) {
    const long double half = z / 2.0L;
    long double sum = 0.0L;
    for (int k = 0; k < terms; ++k) {
        const long double lt = (2.0L * k + nu) * std::log(half) - std::lgamma(k + 1.0L) -
                               std::lgamma(k + nu + 1.0L);
        sum += std::exp(lt);
    }
    return sum;
}

/// Posterior mean of the hidden sources of one Skellam observation with two
/// sources per sign, by enumerating every z with entries <= cap.
inline std::array<std::array<double, 2>, 2> enumerated_source_mean(
    std::int64_t x, const std::array<std::array<double, 2>, 2>& rates, int cap = 40) {
    long double norm = 0.0L;
    std::array<std::array<long double, 2>, 2> acc{};
    for (int a = 0; a <= cap; ++a) {
        for (int b = 0; b <= cap; ++b) {
            for (int c = 0; c <= cap; ++c) {
                const std::int64_t d = a + b - c - x;
                if (d < 0 || d > cap) {
                    continue;
                }
                const long double w =
                    std::exp(poisson_log_pmf_ld(a, rates[0][0]) + poisson_log_pmf_ld(b, rates[0][1]) +
                             poisson_log_pmf_ld(c, rates[1][0]) + poisson_log_pmf_ld(d, rates[1][1]));
                norm += w;
                acc[0][0] += w * a;
                acc[0][1] += w * b;
                acc[1][0] += w * c;
                acc[1][1] += w * static_cast<long double>(d);
            }
        }
    }
    std::array<std::array<double, 2>, 2> out{};
    for (int s = 0; s < 2; ++s) {
        for (int n = 0; n < 2; ++n) {
            out[s][n] = static_cast<double>(acc[s][n] / norm);
        }
    }
    return out;
}

/// Exact ln P(X = x) for the 1 x 1, K = 1 Integer model with
/// lambda ~ Gamma(a, b) and (theta0, theta1) ~ Dirichlet(a0, a1).
///
/// Given lambda the total N = Z0 + Z1 is Poisson(lambda) and Z0 | N is
/// Binomial(N, theta0); integrating out lambda and theta makes N negative
/// binomial and Z0 | N beta-binomial.
inline double tiny_evidence(std::int64_t x, double a, double b, double a0, double a1) {
    const long double p = 1.0L / (b + 1.0L);
    long double total = 0.0L;
    const std::int64_t ax = x < 0 ? -x : x;
    for (std::int64_t n = ax; n < ax + 40000; n += 2) {
        const std::int64_t z0 = (n + x) / 2;
        const std::int64_t z1 = n - z0;
        const long double log_nb = std::lgamma(n + (long double)a) - std::lgamma((long double)a) -
                                   std::lgamma(n + 1.0L) + a * std::log(1.0L - p) + n * std::log(p);
        const long double log_bb =
            std::lgamma(n + 1.0L) - std::lgamma(z0 + 1.0L) - std::lgamma(z1 + 1.0L) +
            std::lgamma(z0 + (long double)a0) + std::lgamma(z1 + (long double)a1) -
            std::lgamma(n + (long double)a0 + a1) + std::lgamma((long double)a0 + a1) -
            std::lgamma((long double)a0) - std::lgamma((long double)a1);
        const long double term = std::exp(log_nb + log_bb);
        total += term;
        if (n > ax + 200 && term < total * 1e-22L) {
            break;
        }
    }
    return static_cast<double>(std::log(total));
}

/// Brute-force maximum of sum_i w(i, perm(i)) over all permutations.
inline double best_diagonal(const Matrix& w) {
    std::vector<int> perm(static_cast<std::size_t>(w.rows()));
    for (std::size_t i = 0; i < perm.size(); ++i) {
        perm[i] = static_cast<int>(i);
    }
    double best = -std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            s += w(static_cast<Index>(i), perm[i]);
        }
        best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline Atoms random_atoms(Index I, Index K, Rng& rng) {
    Atoms atoms(Matrix(I, K), Matrix(I, K));
    const std::vector<double> ones(static_cast<std::size_t>(2 * I), 1.0);
    for (Index k = 0; k < K; ++k) {
        const auto d = rng.dirichlet(ones);
        for (Index i = 0; i < I; ++i) {
            atoms.theta[0](i, k) = d[static_cast<std::size_t>(i)];
            atoms.theta[1](i, k) = d[static_cast<std::size_t>(I + i)];
        }
    }
    return atoms;
}

struct Problem {
    Dataset data;
    HyperParams hyper;
    FactorModel truth;
};

/// A small random problem: Dirichlet(1) atoms, Gamma activations around
/// `scale`, observations drawn from the model (Integer) or Gaussian noise
/// around the reconstruction (RealLimit). Shapes are drawn in [1, 3] and the
/// rate in [0.01, 0.5]; about a fifth of the cells are hidden.
inline Problem random_problem(Index I, Index K, Index J, Mode mode, std::uint64_t seed,
                              double scale = 5.0) {
    Rng rng(seed);
    Problem p;
    p.truth.atoms = random_atoms(I, K, rng);
    p.truth.activations = Matrix(K, J);
    for (Index k = 0; k < K; ++k) {
        for (Index j = 0; j < J; ++j) {
            p.truth.activations(k, j) = rng.gamma(2.0, 2.0 / scale);
        }
    }
    Matrix x;
    if (mode == Mode::Integer) {
        x = sample_observations(p.truth, rng);
    } else {
        x = reconstruct(p.truth).x_hat;
        for (Index n = 0; n < x.size(); ++n) {
            x.data()[n] += rng.normal();
        }
    }
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(I * J), 1);
    for (auto& g : grid) {
        g = rng.uniform() < 0.2 ? 0 : 1;
    }
    p.data.x = std::move(x);
    p.data.mask = Mask::from_grid(I, J, grid);
    p.data.mode = mode;
    p.hyper = HyperParams::shared(I, K, J, rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0),
                                  rng.uniform(0.01, 0.5));
    return p;
}

/// Noiseless supervised setup: I = 10, K = 3, J = 100, random atoms and
/// exponential activations with mean `mean`. X = W lambda, rounded to the
/// nearest integer in Integer mode.
inline Problem supervised_problem(Mode mode, std::uint64_t seed, double mean = 50.0) {
    Rng rng(seed);
    Problem p;
    const Index I = 10;
    const Index K = 3;
    const Index J = 100;
    p.truth.atoms = random_atoms(I, K, rng);
    p.truth.activations = Matrix(K, J);
    for (Index n = 0; n < p.truth.activations.size(); ++n) {
        p.truth.activations.data()[n] = rng.gamma(1.0, 1.0 / mean);
    }
    Matrix x = reconstruct(p.truth).x_hat;
    if (mode == Mode::Integer) {
        x = x.array().round().matrix();
    }
    p.data = Dataset::observed(std::move(x), mode);
    p.hyper = HyperParams::shared(I, K, J, 1.0, 1.0, 0.0);
    return p;
}

/// Every objective value at least the previous one minus `slack`.
inline bool nondecreasing(const std::vector<double>& trace, double slack) {
    for (std::size_t n = 1; n < trace.size(); ++n) {
        if (trace[n] < trace[n - 1] - slack) {
            return false;
        }
    }
    return true;
}

} // namespace snmf::testing
