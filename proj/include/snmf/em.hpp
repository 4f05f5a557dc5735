#pragma once

// MAP estimation of (theta, lambda) by expectation-maximization.

#include "snmf/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace snmf {

/// Raised when an objective or a factor becomes non-finite during a fit.
class NumericalFailure : public std::runtime_error {
  public:
    NumericalFailure(const std::string& what, int iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          reason_(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }
    const std::string& reason() const { return reason_; }

  private:
    std::string reason_;
    int iteration_;
};

enum class InitStrategy {
    /// Dirichlet(1) atoms and exponential activations scaled to the data.
    Random,
    /// Prior means: theta = alpha / sum alpha, lambda = alpha / (1 + beta).
    Prior,
};

struct EmConfig {
    /// Floor applied to the updated factors. Empty selects 1e-12 when any
    /// shape is below 1 and 0 otherwise.
    std::optional<double> epsilon_floor;
    int max_iters = 10000;
    double rel_tol = 1e-8;
    bool update_atoms = true;
    bool update_activations = true;
    std::uint64_t seed = 0;
    InitStrategy init = InitStrategy::Random;
    /// Use the single-threaded reference kernels.
    bool serial_kernels = false;
};

struct EmState {
    FactorModel model;
    std::vector<double> objective_trace;
    int iteration = 0;
};

/// Objective values and elapsed seconds, index 0 being the initial point.
struct FitTrace {
    std::vector<double> objective;
    std::vector<double> wall_time;
};

struct EmFit {
    FactorModel model;
    FitTrace trace;
    int iterations = 0;
    bool converged = false;
};

double resolve_epsilon(const EmConfig& config, const HyperParams& hyper);

/// Log-posterior up to a constant: data fit plus Gamma and Dirichlet prior terms.
double em_objective(const FactorModel& model, const Dataset& data, const HyperParams& hyper);

/// One EM iteration; appends the new objective to the trace.
EmState em_step(EmState state, const Dataset& data, const HyperParams& hyper,
                const EmConfig& config);

FactorModel initial_model(const Dataset& data, const HyperParams& hyper, Index components,
                          InitStrategy strategy, std::uint64_t seed);

/// Iterates em_step until |df| / (|f| + 1) < rel_tol or max_iters. Without an
/// explicit starting point one is drawn with config.init and config.seed.
EmFit em_fit(const Dataset& data, const HyperParams& hyper, const EmConfig& config,
             const std::optional<FactorModel>& init = std::nullopt);

} // namespace snmf
