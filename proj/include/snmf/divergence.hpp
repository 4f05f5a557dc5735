#pragma once

// Skellam divergence D(x | lambda0, lambda1) between a real target x and a
// pair of nonnegative rates:
//
//   D = sum_s [lambda_s - max((-1)^s x, 0) ln lambda_s]
//       - sqrt(x^2 + 4 lambda0 lambda1) + |x| ln((|x| + sqrt(x^2 + 4 lambda0 lambda1)) / 2)
//
// D >= 0 with equality iff x = lambda0 - lambda1; D(x | lambda0, 0) is the
// generalized KL divergence for x >= 0, and D(mu x | mu l0, mu l1) = mu D.
// It is the per-cell data-fitting cost of the real-valued (M -> infinity) model.

#include <utility>

namespace snmf {

struct DivergenceInput {
    double x = 0.0;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
};

/// +inf when the sign of x has a zero rate (e.g. lambda1 = 0 and x < 0).
double skellam_divergence(const DivergenceInput& in);

/// D from ln(lambda_s). Used where the rates may underflow; less accurate near
/// the minimum than skellam_divergence.
double skellam_divergence_from_logs(double x, double log_lambda0, double log_lambda1);

/// (dD/dlambda0, dD/dlambda1); both rates must be strictly positive.
std::pair<double, double> divergence_gradient(const DivergenceInput& in);

} // namespace snmf
