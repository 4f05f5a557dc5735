#pragma once

// Empirical-Bayes estimation of the prior hyperparameters from a collection
// of VBEM posteriors, in batch or online form.
//
// The posteriors enter only through three running averages:
//   gamma_a = <sum_{kj in upsilon^-1(a)} E ln lambda_kj>
//   delta_b = <sum_{kj in omega^-1(b)}   E lambda_kj>
//   xi_a    = <sum_{sik in phi^-1(a)}    E ln theta_sik>
// each updated as s <- (1 - c) s + c * (new term).

#include "snmf/model.hpp"
#include "snmf/vbem.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace snmf {

struct SuffStats {
    /// Indexed by shape slot; only slots in the image of upsilon are used.
    Vector gamma_acc;
    /// Indexed by rate slot.
    Vector delta_acc;
    /// Indexed by shape slot; only slots in the image of phi are used.
    Vector xi_acc;
    int count = 0;
    /// Fixed forgetting factor c; empty means c = 1 / (T + 1).
    std::optional<double> learning_rate;
};

/// Zero accumulators with T = 0: the first accumulate() replaces them.
SuffStats empty_suffstats(const HyperParams& hyper);

/// Accumulators with T = 1, computed as if the prior itself were the
/// posterior (alpha-hat = alpha, beta-hat = beta).
SuffStats init_suffstats(const HyperParams& hyper);

SuffStats accumulate(SuffStats stats, const PosteriorApprox& post, const HyperParams& hyper);

/// Coupled shape/rate update of the activation priors, iterated to a fixed
/// point (change <= tol).
HyperParams update_gamma_hypers(const HyperParams& hyper, const SuffStats& stats,
                                double tol = 1e-10, int max_sweeps = 1000);

/// Fixed-point update of the atom shapes, simultaneous over slots. Stops once
/// every slot satisfies its stationarity equation to within tol.
HyperParams update_dirichlet_hypers(const HyperParams& hyper, const SuffStats& stats,
                                    double tol = 1e-10, int max_sweeps = 20000);

/// The part of sum_t ELBO(Q^t; alpha, beta) that depends on the
/// hyperparameters, with every Q^t held fixed.
double frozen_prior_objective(const HyperParams& hyper, const std::vector<PosteriorApprox>& posts);

struct HyperSnapshot {
    int step = 0;
    Vector alpha;
    Vector beta;
    double elapsed = 0.0;
};

struct OnlineResult {
    std::vector<HyperSnapshot> snapshots;
    HyperParams hyper;
    SuffStats stats;
};

/// For every dataset in turn: VBEM with the current hyperparameters, then
/// accumulate and update both prior families. on_step, when set, is called
/// after each update with the step index and the fitted posterior.
OnlineResult online_learn(const std::vector<Dataset>& stream, const HyperParams& hyper0,
                          std::optional<double> learning_rate, const VbemConfig& config,
                          const std::function<void(int, const PosteriorApprox&,
                                                   const HyperParams&)>& on_step = {});

} // namespace snmf
