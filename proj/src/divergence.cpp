#include "snmf/divergence.hpp"

#include "snmf/specfun.hpp"

#include <cmath>
#include <limits>

namespace snmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rates(const DivergenceInput& in) {
    if (!(in.lambda0 >= 0.0) || !(in.lambda1 >= 0.0)) {
        throw DomainError("skellam_divergence: rates must be nonnegative");
    }
}

// D for x > 0, written so that every term is proportional to the residual
// e = x - (l0 - l1). With r = sqrt(x^2 + 4 l0 l1):
//   l0 + l1 - r          = -e (l0 - l1 + x) / (l0 + l1 + r)
//   ln((x + r) / (2 l0)) = log1p(e / (l0 (1 + 2 l1 / (x + r))))
// the second from r - x = 4 l0 l1 / (x + r), which avoids cancellation when
// l0 is tiny next to x.
double divergence_positive(double x, double l0, double l1) {
    if (l0 == 0.0) {
        return kInf;
    }
    const double r = std::hypot(x, 2.0 * std::sqrt(l0 * l1));
    const double e = x - (l0 - l1);
    return -e * (l0 - l1 + x) / (l0 + l1 + r) +
           x * std::log1p(e / (l0 * (1.0 + 2.0 * l1 / (x + r))));
}

} // namespace

double skellam_divergence(const DivergenceInput& in) {
    check_rates(in);
    if (in.x == 0.0) {
        const double d = std::sqrt(in.lambda0) - std::sqrt(in.lambda1);
        return d * d;
    }
    // D(x | l0, l1) = D(-x | l1, l0).
    const double d = in.x > 0.0 ? divergence_positive(in.x, in.lambda0, in.lambda1)
                                : divergence_positive(-in.x, in.lambda1, in.lambda0);
    // Rounding can leave a tiny negative value at the minimum.
    return d > 0.0 ? d : 0.0;
}

double skellam_divergence_from_logs(double x, double log_lambda0, double log_lambda1) {
    const double l0 = std::exp(log_lambda0);
    const double l1 = std::exp(log_lambda1);
    if (l0 > 1e-280 && l1 > 1e-280) {
        return skellam_divergence({x, l0, l1});
    }
    const double ax = std::abs(x);
    double d = l0 + l1;
    if (x > 0.0) {
        d -= x * log_lambda0;
    } else if (x < 0.0) {
        d -= -x * log_lambda1;
    }
    if (ax == 0.0) {
        return d - 2.0 * std::exp(0.5 * (log_lambda0 + log_lambda1));
    }
    const double r = std::sqrt(ax * ax + 4.0 * std::exp(log_lambda0 + log_lambda1));
    d += -r + ax * std::log(0.5 * (ax + r));
    return d > 0.0 ? d : 0.0;
}

std::pair<double, double> divergence_gradient(const DivergenceInput& in) {
    if (!(in.lambda0 > 0.0) || !(in.lambda1 > 0.0)) {
        throw DomainError("divergence_gradient: rates must be strictly positive");
    }
    const double ax = std::abs(in.x);
    const double r = std::hypot(in.x, 2.0 * std::sqrt(in.lambda0 * in.lambda1));
    const double pos = in.x > 0.0 ? in.x : 0.0;
    const double neg = in.x < 0.0 ? -in.x : 0.0;
    const double g0 = 1.0 - pos / in.lambda0 - 2.0 * in.lambda1 / (ax + r);
    const double g1 = 1.0 - neg / in.lambda1 - 2.0 * in.lambda0 / (ax + r);
    return {g0, g1};
}

} // namespace snmf
