#include "snmf/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace snmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double x, const char* fn) {
    if (!(x > 0.0) || std::isinf(x)) {
        throw DomainError(std::string(fn) + ": argument must be positive and finite");
    }
}

} // namespace

double LogDomainValue::value() const { return std::exp(log_value); }

bool LogDomainValue::is_zero() const { return log_value == -kInf; }

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    int sign = 0;
    // lgamma_r leaves the global signgam untouched.
    return ::lgamma_r(x, &sign);
}

double digamma(double x) {
    require_positive(x, "digamma");
    double shift = 0.0;
    while (x < 6.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number coefficients B_2n / (2n).
    const double series =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 -
                                        inv2 * (1.0 / 132 -
                                                inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
    return shift + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
    require_positive(x, "trigamma");
    double shift = 0.0;
    while (x < 6.0) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 + inv * (0.5 +
                            inv * (1.0 / 6 -
                                   inv2 * (1.0 / 30 -
                                           inv2 * (1.0 / 42 -
                                                   inv2 * (1.0 / 30 -
                                                           inv2 * (5.0 / 66 -
                                                                   inv2 * (691.0 / 2730 -
                                                                           inv2 * (7.0 / 6)))))))));
    return shift + series;
}

double inverse_digamma(double y) {
    if (!std::isfinite(y)) {
        throw DomainError("inverse_digamma: argument must be finite");
    }
    // psi(x) ~ ln(x - 1/2) for large x, so exp(y) + 1/2 overflows past ~709.
    if (y > 709.0) {
        throw DomainError("inverse_digamma: result not representable");
    }
    double x = y >= -2.22 ? std::exp(y) + 0.5 : -1.0 / (y + kEulerGamma);
    for (int iter = 0; iter < 100; ++iter) {
        const double step = (digamma(x) - y) / trigamma(x);
        double next = x - step;
        if (next <= 0.0) {
            next = 0.5 * x;
        }
        const bool done = std::abs(next - x) <= 1e-15 * x;
        x = next;
        if (done) {
            break;
        }
    }
    return x;
}

double bessel_ratio(double order, double z) {
    if (!(order >= 0.0) || !(z >= 0.0) || std::isinf(order) || std::isinf(z)) {
        throw DomainError("bessel_ratio: order and argument must be finite and nonnegative");
    }
    if (z == 0.0) {
        return 0.0;
    }
    // Perron's fraction for I_v / I_{v-1} with v = order + 1:
    //   x / (2v + x - (2v+1)x / (2v+1+2x - (2v+3)x / (2v+2+2x - ...)))
    const double v = order + 1.0;
    auto evaluate = [&](int depth) {
        double tail = 0.0;
        for (int k = depth; k >= 1; --k) {
            tail = (2.0 * v + 2.0 * k - 1.0) * z / (2.0 * v + k + 2.0 * z - tail);
        }
        return z / (2.0 * v + z - tail);
    };
    int depth = 8;
    double previous = evaluate(depth);
    for (int attempt = 0; attempt < 20; ++attempt) {
        depth *= 2;
        const double current = evaluate(depth);
        if (std::abs(current - previous) <= 1e-14 * current) {
            return current;
        }
        previous = current;
    }
    return previous;
}

double log_0F1(double b, double z) {
    if (!(b > 0.0) || !(z >= 0.0) || std::isinf(b) || std::isinf(z)) {
        throw DomainError("log_0F1: need b > 0 and z >= 0, both finite");
    }
    if (z == 0.0) {
        return 0.0;
    }
    // Term ratio t_{k+1}/t_k = z / ((b+k)(k+1)); the peak sits at the positive
    // root of (b+k)(k+1) = z.
    const double bp1 = b + 1.0;
    const double disc = bp1 * bp1 - 4.0 * (b - z);
    double peak = std::floor(0.5 * (-bp1 + std::sqrt(std::max(disc, 0.0))));
    peak = std::max(peak, 0.0);
    // A lower neighbour can tie or beat the floor estimate through rounding.
    while (peak > 0.0 && z / ((b + peak - 1.0) * peak) > 1.0) {
        peak -= 1.0;
    }
    while (z / ((b + peak) * (peak + 1.0)) > 1.0) {
        peak += 1.0;
    }

    const double log_peak = peak * std::log(z) - (log_gamma(b + peak) - log_gamma(b)) -
                            log_gamma(peak + 1.0);

    constexpr double kCutoff = 1e-18;
    double rest = 0.0;
    double term = 1.0;
    for (double k = peak; term > kCutoff * (1.0 + rest); k += 1.0) {
        term *= z / ((b + k) * (k + 1.0));
        rest += term;
    }
    term = 1.0;
    for (double k = peak; k >= 1.0 && term > kCutoff * (1.0 + rest); k -= 1.0) {
        term *= (b + k - 1.0) * k / z;
        rest += term;
    }
    return log_peak + std::log1p(rest);
}

double log_add_exp(double a, double b) {
    if (a == -kInf) {
        return b;
    }
    if (b == -kInf) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

} // namespace snmf
