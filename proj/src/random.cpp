#include "snmf/random.hpp"

#include "snmf/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace snmf {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
    double u = 0.0;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::below: empty range");
    }
    // Rejection keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r = 0;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

double Rng::normal() {
    // Marsaglia polar method, one variate per accepted pair.
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

std::int64_t Rng::poisson(double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("Rng::poisson: rate must be finite and nonnegative");
    }
    if (rate == 0.0) {
        return 0;
    }
    if (rate < 10.0) {
        // Sequential search on the cdf.
        const double u = uniform();
        double p = std::exp(-rate);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= rate / static_cast<double>(k);
            cdf += p;
            if (p < 1e-300 && cdf >= 1.0 - 1e-15) {
                break;
            }
        }
        return k;
    }
    // Hormann's transformed rejection with squeeze (PTRS).
    const double log_rate = std::log(rate);
    const double b = 0.931 + 2.53 * std::sqrt(rate);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::int64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -rate + k * log_rate - log_gamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

double Rng::log_gamma_variate(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("Rng::gamma: shape must be positive and finite");
    }
    if (shape < 1.0) {
        // G(a) = G(a+1) * U^(1/a)
        return log_gamma_variate(shape + 1.0) + std::log(uniform_open()) / shape;
    }
    // Marsaglia-Tsang.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = 0.0, v = 0.0;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x ||
            std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return std::log(d * v);
        }
    }
}

double Rng::gamma(double shape, double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("Rng::gamma: rate must be positive");
    }
    return std::exp(log_gamma_variate(shape)) / rate;
}

std::vector<double> Rng::dirichlet(std::span<const double> concentration) {
    std::vector<double> logs(concentration.size());
    for (std::size_t n = 0; n < concentration.size(); ++n) {
        logs[n] = log_gamma_variate(concentration[n]);
    }
    const double hi = *std::max_element(logs.begin(), logs.end());
    double total = 0.0;
    for (auto& l : logs) {
        l = std::exp(l - hi);
        total += l;
    }
    for (auto& l : logs) {
        l /= total;
    }
    return logs;
}

} // namespace snmf
