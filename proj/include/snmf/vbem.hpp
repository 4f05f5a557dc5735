#pragma once

// Variational Bayes EM with a fully factorized posterior
//   q(lambda_kj) = Gamma(alpha-hat_kj, beta-hat_kj)
//   q(theta_k)   = Dirichlet(alpha-hat_{..k})
// and the hidden sources integrated out exactly.

#include "snmf/em.hpp"
#include "snmf/model.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace snmf {

struct PosteriorApprox {
    Matrix alpha_hat_act;
    Matrix beta_hat_act;
    std::array<Matrix, 2> alpha_hat_atoms;

    Index attributes() const { return alpha_hat_atoms[0].rows(); }
    Index components() const { return alpha_hat_act.rows(); }
    Index instances() const { return alpha_hat_act.cols(); }
};

/// Which closed form to use for the activation KL and the real-valued data
/// term. Standard is the exact bound; Printed reproduces an alternative
/// transcription kept only so the two can be compared.
enum class ElboForm { Standard, Printed };

enum class PosteriorInit {
    /// alpha-hat equal to the prior shapes, beta-hat = beta + 1.
    Prior,
    /// Prior shapes times independent Gamma(1, 1) factors.
    Jitter,
};

struct VbemConfig {
    int max_iters = 10000;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0;
    PosteriorInit init = PosteriorInit::Prior;
    ElboForm elbo_form = ElboForm::Standard;
};

struct VbemFit {
    PosteriorApprox posterior;
    FitTrace trace;
    int iterations = 0;
    bool converged = false;
};

/// Surrogates in log form: ln ell_kj = psi(alpha-hat_kj) - ln beta-hat_kj and
/// ln h_sik = psi(alpha-hat_sik) - psi(sum_{s'i'} alpha-hat_{s'i'k}).
struct LogSurrogates {
    Matrix log_ell;
    std::array<Matrix, 2> log_h;
};

LogSurrogates log_surrogates(const PosteriorApprox& post);

PosteriorApprox initial_posterior(const HyperParams& hyper, PosteriorInit strategy,
                                  std::uint64_t seed);

PosteriorApprox vbem_step(const PosteriorApprox& post, const Dataset& data,
                          const HyperParams& hyper);

/// The three pieces of the bound, summed by elbo().
struct ElboParts {
    double sources = 0.0;
    double activations = 0.0;
    double atoms = 0.0;
    double total() const { return sources + activations + atoms; }
};

ElboParts elbo_parts(const PosteriorApprox& post, const Dataset& data, const HyperParams& hyper,
                     ElboForm form = ElboForm::Standard);
double elbo(const PosteriorApprox& post, const Dataset& data, const HyperParams& hyper,
            ElboForm form = ElboForm::Standard);

/// -KL(Gamma(a_hat, b_hat) || Gamma(a, b)).
double gamma_elbo_term(double a_hat, double b_hat, double a, double b, ElboForm form);

/// Posterior means of lambda and theta.
FactorModel posterior_mean(const PosteriorApprox& post);

VbemFit vbem_fit(const Dataset& data, const HyperParams& hyper, const VbemConfig& config,
                 const std::optional<PosteriorApprox>& init = std::nullopt);

} // namespace snmf
