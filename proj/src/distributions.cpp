#include "snmf/distributions.hpp"

#include "snmf/specfun.hpp"

#include <cmath>
#include <limits>

namespace snmf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// count * ln(rate) with 0 ln 0 = 0 and count > 0 on a zero rate giving -inf.
double weighted_log(double count, double rate) {
    if (count == 0.0) {
        return 0.0;
    }
    return rate > 0.0 ? count * std::log(rate) : kNegInf;
}

double weighted_log_from_log(double count, double log_rate) {
    if (count == 0.0) {
        return 0.0;
    }
    return count * log_rate;
}

} // namespace

void SkellamParams::validate() const {
    if (!(lambda0 >= 0.0) || !(lambda1 >= 0.0) || std::isinf(lambda0) || std::isinf(lambda1)) {
        throw DomainError("Skellam rates must be finite and nonnegative");
    }
}

SourceRates::SourceRates(Eigen::Matrix<double, 2, Eigen::Dynamic> rates)
    : rates_(std::move(rates)) {
    if (!rates_.allFinite() || (rates_.array() < 0.0).any()) {
        throw DomainError("source rates must be finite and nonnegative");
    }
    marginals_[0] = rates_.row(0).sum();
    marginals_[1] = rates_.row(1).sum();
}

double skellam_log_pmf(std::int64_t x, const SkellamParams& params) {
    params.validate();
    const double xd = static_cast<double>(x);
    const double a0 = weighted_log(signed_part(xd, 0), params.lambda0);
    const double a1 = weighted_log(signed_part(xd, 1), params.lambda1);
    if (a0 == kNegInf || a1 == kNegInf) {
        return kNegInf;
    }
    const double abs_x = std::abs(xd);
    return log_0F1(abs_x + 1.0, params.lambda0 * params.lambda1) - log_gamma(abs_x + 1.0) -
           params.lambda0 - params.lambda1 + a0 + a1;
}

double skellam_log_pmf_from_logs(double x, double log_lambda0, double log_lambda1) {
    const double a0 = weighted_log_from_log(signed_part(x, 0), log_lambda0);
    const double a1 = weighted_log_from_log(signed_part(x, 1), log_lambda1);
    if (a0 == kNegInf || a1 == kNegInf) {
        return kNegInf;
    }
    const double abs_x = std::abs(x);
    const double sigma = std::exp(log_lambda0 + log_lambda1);
    return log_0F1(abs_x + 1.0, sigma) - log_gamma(abs_x + 1.0) - std::exp(log_lambda0) -
           std::exp(log_lambda1) + a0 + a1;
}

std::int64_t skellam_sample(const SkellamParams& params, Rng& rng) {
    params.validate();
    const std::int64_t x0 = rng.poisson(params.lambda0);
    const std::int64_t x1 = rng.poisson(params.lambda1);
    return x0 - x1;
}

double posterior_denominator(double abs_x, double sigma) {
    if (sigma <= 0.0) {
        return abs_x + 1.0;
    }
    const double root = std::sqrt(sigma);
    return abs_x + 1.0 + root * bessel_ratio(abs_x + 1.0, 2.0 * root);
}

Eigen::Matrix<double, 2, Eigen::Dynamic> posterior_source_mean(std::int64_t x,
                                                               const SourceRates& rates) {
    const double xd = static_cast<double>(x);
    const double m0 = rates.marginal(0);
    const double m1 = rates.marginal(1);
    if (m0 == 0.0 && m1 == 0.0 && x != 0) {
        throw ImpossibleObservation("posterior_source_mean: both marginals are zero");
    }
    const double denom = posterior_denominator(std::abs(xd), m0 * m1);
    double factor[2];
    for (int s = 0; s < 2; ++s) {
        const double part = signed_part(xd, s);
        const double own = rates.marginal(s);
        if (part > 0.0 && own == 0.0) {
            throw ImpossibleObservation("posterior_source_mean: observation sign has zero rate");
        }
        factor[s] = (part > 0.0 ? part / own : 0.0) + rates.marginal(1 - s) / denom;
    }
    Eigen::Matrix<double, 2, Eigen::Dynamic> out(2, rates.sources());
    out.row(0) = rates.rates().row(0) * factor[0];
    out.row(1) = rates.rates().row(1) * factor[1];
    return out;
}

double diffnomial_log_pmf(const Eigen::Matrix<std::int64_t, 2, Eigen::Dynamic>& z,
                          std::int64_t x, const SourceRates& rates) {
    if (z.cols() != rates.sources()) {
        throw std::invalid_argument("diffnomial_log_pmf: source count mismatch");
    }
    if ((z.array() < 0).any()) {
        return kNegInf;
    }
    if (z.row(0).sum() - z.row(1).sum() != x) {
        return kNegInf;
    }
    const double xd = static_cast<double>(x);
    const double abs_x = std::abs(xd);
    double log_norm = log_gamma(abs_x + 1.0) -
                      log_0F1(abs_x + 1.0, rates.marginal(0) * rates.marginal(1));
    for (int s = 0; s < 2; ++s) {
        const double w = weighted_log(signed_part(xd, s), rates.marginal(s));
        if (w == kNegInf) {
            return kNegInf;
        }
        log_norm -= w;
    }
    double body = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (Eigen::Index n = 0; n < z.cols(); ++n) {
            const double count = static_cast<double>(z(s, n));
            const double w = weighted_log(count, rates.rates()(s, n));
            if (w == kNegInf) {
                return kNegInf;
            }
            body += w - log_gamma(count + 1.0);
        }
    }
    return log_norm + body;
}

} // namespace snmf
