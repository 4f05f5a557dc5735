#pragma once

// Inner loops shared by EM and VBEM.
//
// Both algorithms need, for the current factors (theta, lambda for EM; the
// geometric-mean surrogates h, ell for VBEM), the posterior expectation of
// every hidden Poisson source Z_sikj given the data, summed over the free
// index:
//
//   act(k, j)      = sum_{s,i} <Z_sikj> = lambda_kj U^act_kj
//   atoms[s](i, k) = sum_j     <Z_sikj> = theta_sik U^atoms_sik
//
// The top-level functions are OpenMP-parallel over columns j; the atom sums
// are reduced per thread and combined in thread order so results do not
// depend on scheduling. namespace serial holds a direct transcription that
// materializes lambda-bar and U, kept as the reference for tests and
// benchmarks.

#include "snmf/model.hpp"

#include <array>
#include <stdexcept>

namespace snmf::kernels {

struct ExpectedCounts {
    Matrix act;
    std::array<Matrix, 2> atoms;
};

/// Thrown when an observed cell has zero probability under the current factors
/// (e.g. x > 0 while lambda-bar_0 = 0).
class ImpossibleModel : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Multiplicative factors (U_0, U_1) of one observed cell given its rates.
/// U_s is set to 0 when lambda-bar_s = 0 (every source feeding it is 0).
std::array<double, 2> cell_multipliers(double x, double lambda_bar0, double lambda_bar1, Mode mode);

/// ln U_s from ln lambda-bar_s; -inf stands for U_s = 0.
std::array<double, 2> cell_log_multipliers(double x, double log_lambda_bar0,
                                           double log_lambda_bar1, Mode mode);

/// Per-cell fit term: Skellam log-pmf (Integer) or -D (RealLimit).
double cell_fit(double x, double lambda_bar0, double lambda_bar1, Mode mode);
double cell_fit_log(double x, double log_lambda_bar0, double log_lambda_bar1, Mode mode);

/// Factors given by value.
ExpectedCounts expected_counts(const std::array<Matrix, 2>& atoms, const Matrix& act,
                               const Dataset& data);

/// Factors given by their natural logs (-inf allowed). Used by VBEM when the
/// surrogates would underflow.
ExpectedCounts expected_counts_log(const std::array<Matrix, 2>& log_atoms, const Matrix& log_act,
                                   const Dataset& data);

/// sum over observed cells of cell_fit at lambda-bar = atoms * act.
double data_fit(const std::array<Matrix, 2>& atoms, const Matrix& act, const Dataset& data);
double data_fit_log(const std::array<Matrix, 2>& log_atoms, const Matrix& log_act,
                    const Dataset& data);

/// ln(sum_k exp(log_atoms[s](i, k) + log_act(k, j))) for both s.
std::array<Matrix, 2> log_rates(const std::array<Matrix, 2>& log_atoms, const Matrix& log_act);

namespace serial {

ExpectedCounts expected_counts(const std::array<Matrix, 2>& atoms, const Matrix& act,
                               const Dataset& data);
double data_fit(const std::array<Matrix, 2>& atoms, const Matrix& act, const Dataset& data);

} // namespace serial

} // namespace snmf::kernels
