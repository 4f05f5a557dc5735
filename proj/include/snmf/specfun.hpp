#pragma once

// Special functions used throughout the Skellam machinery. Everything that can
// overflow (the 0F1 function grows like exp(2 sqrt(z))) is carried in log
// domain. All functions are pure and thread-safe.

#include <stdexcept>

namespace snmf {

/// Thrown when a special function is evaluated outside its domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Natural log of a positive quantity; -inf encodes log(0).
struct LogDomainValue {
    double log_value = 0.0;

    double value() const;
    bool is_zero() const;
};

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x) for x > 0. Recurrence shift to x >= 6 followed by
/// the asymptotic series.
double digamma(double x);

/// psi'(x) for x > 0; needed by the Newton iteration in inverse_digamma.
double trigamma(double x);

/// Returns x > 0 with digamma(x) == y, by Newton iteration from the usual
/// two-regime starting point.
double inverse_digamma(double y);

/// R_nu(z) = I_{nu+1}(z) / I_nu(z), nu >= 0, z >= 0.
///
/// Evaluated through Perron's continued fraction, summed backward with the
/// depth doubled until two successive depths agree to 1e-14. The Bessel
/// functions themselves are never formed, so the result is valid for any z.
double bessel_ratio(double order, double z);

/// ln 0F1(; b; z) for b > 0 and z >= 0.
///
/// The hypergeometric series has positive terms whose magnitudes peak near
/// k* ~ sqrt(z). The sum is taken outward from k* relative to the peak term,
/// so nothing overflows and only O(z^(1/4)) terms are visited.
double log_0F1(double b, double z);

/// ln(exp(a) + exp(b)) without overflow; -inf inputs are allowed.
double log_add_exp(double a, double b);

} // namespace snmf
