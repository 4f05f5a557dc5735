#include "snmf/vbem.hpp"

#include "snmf/kernels.hpp"
#include "snmf/random.hpp"
#include "snmf/specfun.hpp"

#include <chrono>
#include <cmath>

namespace snmf {

namespace {

// Below this value of ln(h) + ln(ell) the products are formed in log domain.
constexpr double kLinearKernelFloor = -600.0;

void require_valid(const HyperParams& hyper, const Dataset& data) {
    const auto violations = validate(nullptr, &hyper, &data);
    if (!violations.empty()) {
        throw std::invalid_argument(violations.front().kind + ": " + violations.front().message);
    }
    for (Index b = 0; b < hyper.beta.size(); ++b) {
        if (!(hyper.beta[b] > 0.0)) {
            throw std::invalid_argument("vbem: activation rates must be strictly positive");
        }
    }
    if (hyper.instances() != data.instances() || hyper.attributes() != data.attributes()) {
        throw std::invalid_argument("vbem: hyperparameter maps do not match the data");
    }
}

double sum_of(const std::array<Matrix, 2>& m, Index k) { return m[0].col(k).sum() + m[1].col(k).sum(); }

} // namespace

LogSurrogates log_surrogates(const PosteriorApprox& post) {
    LogSurrogates out;
    const Index K = post.components();
    out.log_ell.resize(K, post.instances());
    for (Index j = 0; j < post.instances(); ++j) {
        for (Index k = 0; k < K; ++k) {
            out.log_ell(k, j) = digamma(post.alpha_hat_act(k, j)) - std::log(post.beta_hat_act(k, j));
        }
    }
    const Index I = post.attributes();
    out.log_h = {Matrix(I, K), Matrix(I, K)};
    for (Index k = 0; k < K; ++k) {
        const double psi_total = digamma(sum_of(post.alpha_hat_atoms, k));
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                out.log_h[s](i, k) = digamma(post.alpha_hat_atoms[s](i, k)) - psi_total;
            }
        }
    }
    return out;
}

PosteriorApprox initial_posterior(const HyperParams& hyper, PosteriorInit strategy,
                                  std::uint64_t seed) {
    const Index I = hyper.attributes();
    const Index K = hyper.components();
    const Index J = hyper.instances();
    PosteriorApprox p;
    p.alpha_hat_act.resize(K, J);
    p.beta_hat_act.resize(K, J);
    p.alpha_hat_atoms = {Matrix(I, K), Matrix(I, K)};
    Rng rng(seed);
    const bool jitter = strategy == PosteriorInit::Jitter;
    for (Index k = 0; k < K; ++k) {
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                const double f = jitter ? rng.gamma(1.0, 1.0) : 1.0;
                p.alpha_hat_atoms[s](i, k) = hyper.atom_shape(s, i, k) * f;
            }
        }
    }
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            const double f = jitter ? rng.gamma(1.0, 1.0) : 1.0;
            p.alpha_hat_act(k, j) = hyper.act_shape(k, j) * f;
            p.beta_hat_act(k, j) = hyper.act_rate(k, j) + 1.0;
        }
    }
    return p;
}

PosteriorApprox vbem_step(const PosteriorApprox& post, const Dataset& data,
                          const HyperParams& hyper) {
    const auto ls = log_surrogates(post);
    const double lo = ls.log_ell.minCoeff() + std::min(ls.log_h[0].minCoeff(), ls.log_h[1].minCoeff());
    if (!std::isfinite(lo)) {
        throw NumericalFailure("VBEM surrogate is not finite", 0);
    }

    kernels::ExpectedCounts counts;
    if (lo > kLinearKernelFloor) {
        const std::array<Matrix, 2> h{ls.log_h[0].array().exp().matrix(),
                                      ls.log_h[1].array().exp().matrix()};
        const Matrix ell = ls.log_ell.array().exp().matrix();
        counts = kernels::expected_counts(h, ell, data);
    } else {
        counts = kernels::expected_counts_log(ls.log_h, ls.log_ell, data);
    }

    PosteriorApprox next = post;
    for (Index j = 0; j < post.instances(); ++j) {
        for (Index k = 0; k < post.components(); ++k) {
            next.alpha_hat_act(k, j) = counts.act(k, j) + hyper.act_shape(k, j);
        }
    }
    for (int s = 0; s < 2; ++s) {
        for (Index k = 0; k < post.components(); ++k) {
            for (Index i = 0; i < post.attributes(); ++i) {
                next.alpha_hat_atoms[s](i, k) = counts.atoms[s](i, k) + hyper.atom_shape(s, i, k);
            }
        }
    }
    if (!next.alpha_hat_act.allFinite() || !next.alpha_hat_atoms[0].allFinite() ||
        !next.alpha_hat_atoms[1].allFinite()) {
        throw NumericalFailure("VBEM posterior shape is not finite", 0);
    }
    return next;
}

double gamma_elbo_term(double a_hat, double b_hat, double a, double b, ElboForm form) {
    const double psi = digamma(a_hat);
    const double shape_term = form == ElboForm::Standard ? -(a_hat - a) * psi : a * psi;
    return a * std::log(b / b_hat) + a_hat * (1.0 - b / b_hat) + shape_term + log_gamma(a_hat) -
           log_gamma(a);
}

ElboParts elbo_parts(const PosteriorApprox& post, const Dataset& data, const HyperParams& hyper,
                     ElboForm form) {
    const Index I = post.attributes();
    const Index K = post.components();
    const Index J = post.instances();
    const auto ls = log_surrogates(post);
    ElboParts parts;

    double mean_act = 0.0;
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            mean_act += post.alpha_hat_act(k, j) / post.beta_hat_act(k, j);
        }
    }
    parts.sources = -mean_act;

    if (form == ElboForm::Printed && data.mode == Mode::RealLimit) {
        const auto ll = kernels::log_rates(ls.log_h, ls.log_ell);
        for (Index j = 0; j < J; ++j) {
            for (Index i = 0; i < I; ++i) {
                const double l0 = std::exp(ll[0](i, j));
                const double l1 = std::exp(ll[1](i, j));
                if (!data.mask.observed(i, j)) {
                    parts.sources += l0 + l1;
                    continue;
                }
                const double x = data.x(i, j);
                const double ax = std::abs(x);
                const double r = std::sqrt(x * x + 4.0 * l0 * l1);
                double cell = (ax > 0.0 ? ax * std::log(0.5 * (ax + r)) : 0.0) - r;
                if (x > 0.0) {
                    cell += x * ll[0](i, j);
                } else if (x < 0.0) {
                    cell -= x * ll[1](i, j);
                }
                parts.sources += cell;
            }
        }
    } else {
        // sum over every cell of ell-bar_0 + ell-bar_1, then the per-cell fit
        // (which subtracts them again on observed cells).
        for (Index k = 0; k < K; ++k) {
            const double h_total =
                ls.log_h[0].col(k).array().exp().sum() + ls.log_h[1].col(k).array().exp().sum();
            parts.sources += h_total * ls.log_ell.row(k).array().exp().sum();
        }
        parts.sources += kernels::data_fit_log(ls.log_h, ls.log_ell, data);
    }

    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            parts.activations += gamma_elbo_term(post.alpha_hat_act(k, j), post.beta_hat_act(k, j),
                                                 hyper.act_shape(k, j), hyper.act_rate(k, j), form);
        }
    }

    for (Index k = 0; k < K; ++k) {
        double prior_total = 0.0;
        double post_total = 0.0;
        double g = 0.0;
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                const double a = hyper.atom_shape(s, i, k);
                const double a_hat = post.alpha_hat_atoms[s](i, k);
                prior_total += a;
                post_total += a_hat;
                g += -log_gamma(a) + log_gamma(a_hat) - (a_hat - a) * ls.log_h[s](i, k);
            }
        }
        parts.atoms += g + log_gamma(prior_total) - log_gamma(post_total);
    }
    return parts;
}

double elbo(const PosteriorApprox& post, const Dataset& data, const HyperParams& hyper,
            ElboForm form) {
    return elbo_parts(post, data, hyper, form).total();
}

FactorModel posterior_mean(const PosteriorApprox& post) {
    FactorModel m;
    m.activations = post.alpha_hat_act.cwiseQuotient(post.beta_hat_act);
    m.atoms.theta = post.alpha_hat_atoms;
    for (Index k = 0; k < post.components(); ++k) {
        const double total = sum_of(post.alpha_hat_atoms, k);
        m.atoms.theta[0].col(k) /= total;
        m.atoms.theta[1].col(k) /= total;
    }
    return m;
}

VbemFit vbem_fit(const Dataset& data, const HyperParams& hyper, const VbemConfig& config,
                 const std::optional<PosteriorApprox>& init) {
    require_valid(hyper, data);
    VbemFit fit;
    fit.posterior = init ? *init : initial_posterior(hyper, config.init, config.seed);

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto evaluate = [&](int iteration) {
        const double g = elbo(fit.posterior, data, hyper, config.elbo_form);
        if (!std::isfinite(g)) {
            throw NumericalFailure("ELBO is not finite", iteration);
        }
        fit.trace.objective.push_back(g);
        fit.trace.wall_time.push_back(elapsed());
    };

    evaluate(0);
    while (fit.iterations < config.max_iters) {
        try {
            fit.posterior = vbem_step(fit.posterior, data, hyper);
        } catch (const NumericalFailure& e) {
            throw NumericalFailure(e.reason(), fit.iterations + 1);
        }
        ++fit.iterations;
        evaluate(fit.iterations);
        const double prev = fit.trace.objective[fit.trace.objective.size() - 2];
        const double cur = fit.trace.objective.back();
        if (std::abs(cur - prev) / (std::abs(cur) + 1.0) < config.rel_tol) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

} // namespace snmf
