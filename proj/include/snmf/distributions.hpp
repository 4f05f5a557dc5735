#pragma once

// Skellam and diffnomial laws.
//
// A Skellam variable is X = X0 - X1 with X_s ~ Poisson(lambda_s). When X is
// the sum of N hidden Skellam sources, the posterior of the underlying Poisson
// sources Z_sn given X = x is the diffnomial law; its mean is the E-step kernel
// of both EM and VBEM.

#include "snmf/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>

namespace snmf {

/// Raised when an observation has probability zero under the given rates.
class ImpossibleObservation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SkellamParams {
    double lambda0 = 0.0;
    double lambda1 = 0.0;

    double mean() const { return lambda0 - lambda1; }
    double variance() const { return lambda0 + lambda1; }
    void validate() const;
};

/// Rates lambda_sn of the hidden Poisson sources, row s in {0, 1}.
class SourceRates {
  public:
    explicit SourceRates(Eigen::Matrix<double, 2, Eigen::Dynamic> rates);

    const Eigen::Matrix<double, 2, Eigen::Dynamic>& rates() const { return rates_; }
    Eigen::Index sources() const { return rates_.cols(); }
    /// lambda-bar_s = sum_n lambda_sn.
    double marginal(int s) const { return marginals_[s]; }

  private:
    Eigen::Matrix<double, 2, Eigen::Dynamic> rates_;
    double marginals_[2];
};

/// max((-1)^s x, 0): the positive part for s = 0, negative part for s = 1.
inline double signed_part(double x, int s) {
    const double v = s == 0 ? x : -x;
    return v > 0.0 ? v : 0.0;
}

double skellam_log_pmf(std::int64_t x, const SkellamParams& params);

/// Same as skellam_log_pmf but from ln(lambda_s); -inf encodes a zero rate.
double skellam_log_pmf_from_logs(double x, double log_lambda0, double log_lambda1);

std::int64_t skellam_sample(const SkellamParams& params, Rng& rng);

/// |x| + 1 + sqrt(sigma) R_{|x|+1}(2 sqrt(sigma)), with sigma = lambda0 lambda1.
/// Depends only on the marginals, so it is shared by every source.
double posterior_denominator(double abs_x, double sigma);

/// <Z_sn | X = x> for every source.
Eigen::Matrix<double, 2, Eigen::Dynamic> posterior_source_mean(std::int64_t x,
                                                               const SourceRates& rates);

/// ln P(Z = z | X = x); -inf off the support sum_n z_0n - z_1n = x.
double diffnomial_log_pmf(const Eigen::Matrix<std::int64_t, 2, Eigen::Dynamic>& z,
                          std::int64_t x, const SourceRates& rates);

} // namespace snmf
