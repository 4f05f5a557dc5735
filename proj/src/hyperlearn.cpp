#include "snmf/hyperlearn.hpp"

#include "snmf/specfun.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snmf {

namespace {

struct Contribution {
    Vector gamma;
    Vector delta;
    Vector xi;
};

void check_slots(const HyperParams& hyper) {
    const auto violations = validate(nullptr, &hyper, nullptr);
    for (const auto& v : violations) {
        if (v.kind == "slot_range" || v.kind == "dimension") {
            throw std::invalid_argument("hyperlearn: " + v.message);
        }
    }
}

Contribution contribution(const PosteriorApprox& post, const HyperParams& hyper) {
    if (post.components() != hyper.components() || post.instances() != hyper.instances() ||
        post.attributes() != hyper.attributes()) {
        throw std::invalid_argument("hyperlearn: posterior and hyperparameter maps differ in shape");
    }
    Contribution c{Vector::Zero(hyper.alpha.size()), Vector::Zero(hyper.beta.size()),
                   Vector::Zero(hyper.alpha.size())};
    for (Index j = 0; j < post.instances(); ++j) {
        for (Index k = 0; k < post.components(); ++k) {
            const double a_hat = post.alpha_hat_act(k, j);
            const double b_hat = post.beta_hat_act(k, j);
            c.gamma[hyper.upsilon_map(k, j)] += digamma(a_hat) - std::log(b_hat);
            c.delta[hyper.omega_map(k, j)] += a_hat / b_hat;
        }
    }
    for (Index k = 0; k < post.components(); ++k) {
        const double psi_total =
            digamma(post.alpha_hat_atoms[0].col(k).sum() + post.alpha_hat_atoms[1].col(k).sum());
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < post.attributes(); ++i) {
                c.xi[hyper.phi_map[s](i, k)] += digamma(post.alpha_hat_atoms[s](i, k)) - psi_total;
            }
        }
    }
    return c;
}

double relative_change(double next, double prev) {
    return std::abs(next - prev) / std::max(1.0, std::abs(prev));
}

} // namespace

SuffStats empty_suffstats(const HyperParams& hyper) {
    SuffStats s;
    s.gamma_acc = Vector::Zero(hyper.alpha.size());
    s.delta_acc = Vector::Zero(hyper.beta.size());
    s.xi_acc = Vector::Zero(hyper.alpha.size());
    return s;
}

SuffStats init_suffstats(const HyperParams& hyper) {
    check_slots(hyper);
    PosteriorApprox prior;
    const Index K = hyper.components();
    const Index J = hyper.instances();
    prior.alpha_hat_act.resize(K, J);
    prior.beta_hat_act.resize(K, J);
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            prior.alpha_hat_act(k, j) = hyper.act_shape(k, j);
            prior.beta_hat_act(k, j) = hyper.act_rate(k, j);
        }
    }
    prior.alpha_hat_atoms = {Matrix(hyper.attributes(), K), Matrix(hyper.attributes(), K)};
    for (int s = 0; s < 2; ++s) {
        for (Index k = 0; k < K; ++k) {
            for (Index i = 0; i < hyper.attributes(); ++i) {
                prior.alpha_hat_atoms[s](i, k) = hyper.atom_shape(s, i, k);
            }
        }
    }
    auto c = contribution(prior, hyper);
    SuffStats s;
    s.gamma_acc = std::move(c.gamma);
    s.delta_acc = std::move(c.delta);
    s.xi_acc = std::move(c.xi);
    s.count = 1;
    return s;
}

SuffStats accumulate(SuffStats stats, const PosteriorApprox& post, const HyperParams& hyper) {
    check_slots(hyper);
    const auto add = contribution(post, hyper);
    const double c = stats.learning_rate ? *stats.learning_rate : 1.0 / (stats.count + 1.0);
    stats.gamma_acc = (1.0 - c) * stats.gamma_acc + c * add.gamma;
    stats.delta_acc = (1.0 - c) * stats.delta_acc + c * add.delta;
    stats.xi_acc = (1.0 - c) * stats.xi_acc + c * add.xi;
    ++stats.count;
    return stats;
}

HyperParams update_gamma_hypers(const HyperParams& hyper, const SuffStats& stats, double tol,
                                int max_sweeps) {
    check_slots(hyper);
    const Index K = hyper.components();
    const Index J = hyper.instances();
    Vector shape_count = Vector::Zero(hyper.alpha.size());
    Vector rate_count = Vector::Zero(hyper.beta.size());
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            shape_count[hyper.upsilon_map(k, j)] += 1.0;
            rate_count[hyper.omega_map(k, j)] += 1.0;
        }
    }
    for (Index b = 0; b < rate_count.size(); ++b) {
        if (rate_count[b] == 0.0) {
            throw std::invalid_argument("update_gamma_hypers: rate slot " + std::to_string(b) +
                                        " is not used by any activation");
        }
    }

    HyperParams out = hyper;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Vector log_rate_sum = Vector::Zero(hyper.alpha.size());
        for (Index j = 0; j < J; ++j) {
            for (Index k = 0; k < K; ++k) {
                log_rate_sum[out.upsilon_map(k, j)] += std::log(out.act_rate(k, j));
            }
        }
        double change = 0.0;
        for (Index a = 0; a < out.alpha.size(); ++a) {
            if (shape_count[a] == 0.0) {
                continue;
            }
            const double next = inverse_digamma((log_rate_sum[a] + stats.gamma_acc[a]) / shape_count[a]);
            change = std::max(change, relative_change(next, out.alpha[a]));
            out.alpha[a] = next;
        }
        Vector shape_sum = Vector::Zero(hyper.beta.size());
        for (Index j = 0; j < J; ++j) {
            for (Index k = 0; k < K; ++k) {
                shape_sum[out.omega_map(k, j)] += out.act_shape(k, j);
            }
        }
        for (Index b = 0; b < out.beta.size(); ++b) {
            const double next = shape_sum[b] / stats.delta_acc[b];
            change = std::max(change, relative_change(next, out.beta[b]));
            out.beta[b] = next;
        }
        if (change <= tol) {
            break;
        }
    }
    return out;
}

HyperParams update_dirichlet_hypers(const HyperParams& hyper, const SuffStats& stats, double tol,
                                    int max_sweeps) {
    check_slots(hyper);
    const Index I = hyper.attributes();
    const Index K = hyper.components();
    Vector slot_count = Vector::Zero(hyper.alpha.size());
    for (int s = 0; s < 2; ++s) {
        for (Index k = 0; k < K; ++k) {
            for (Index i = 0; i < I; ++i) {
                slot_count[hyper.phi_map[s](i, k)] += 1.0;
            }
        }
    }

    HyperParams out = hyper;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Vector psi_sum = Vector::Zero(hyper.alpha.size());
        for (Index k = 0; k < K; ++k) {
            double total = 0.0;
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < I; ++i) {
                    total += out.atom_shape(s, i, k);
                }
            }
            const double psi_total = digamma(total);
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < I; ++i) {
                    psi_sum[out.phi_map[s](i, k)] += psi_total;
                }
            }
        }
        double change = 0.0;
        Vector next = out.alpha;
        for (Index a = 0; a < out.alpha.size(); ++a) {
            if (slot_count[a] == 0.0) {
                continue;
            }
            const double target = (psi_sum[a] + stats.xi_acc[a]) / slot_count[a];
            change = std::max(change, std::abs(digamma(out.alpha[a]) - target));
            next[a] = inverse_digamma(target);
        }
        if (change <= tol) {
            break;
        }
        out.alpha = std::move(next);
    }
    return out;
}

double frozen_prior_objective(const HyperParams& hyper, const std::vector<PosteriorApprox>& posts) {
    double total = 0.0;
    for (const auto& post : posts) {
        const auto ls = log_surrogates(post);
        for (Index j = 0; j < post.instances(); ++j) {
            for (Index k = 0; k < post.components(); ++k) {
                const double a = hyper.act_shape(k, j);
                const double b = hyper.act_rate(k, j);
                total += a * std::log(b) - log_gamma(a) + (a - 1.0) * ls.log_ell(k, j) -
                         b * post.alpha_hat_act(k, j) / post.beta_hat_act(k, j);
            }
        }
        for (Index k = 0; k < post.components(); ++k) {
            double prior_total = 0.0;
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < post.attributes(); ++i) {
                    const double a = hyper.atom_shape(s, i, k);
                    prior_total += a;
                    total += -log_gamma(a) + (a - 1.0) * ls.log_h[s](i, k);
                }
            }
            total += log_gamma(prior_total);
        }
    }
    return total;
}

OnlineResult online_learn(const std::vector<Dataset>& stream, const HyperParams& hyper0,
                          std::optional<double> learning_rate, const VbemConfig& config,
                          const std::function<void(int, const PosteriorApprox&,
                                                   const HyperParams&)>& on_step) {
    const auto start = std::chrono::steady_clock::now();
    OnlineResult result;
    result.hyper = hyper0;
    result.stats = init_suffstats(hyper0);
    result.stats.learning_rate = learning_rate;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        VbemFit fit;
        try {
            fit = vbem_fit(stream[t], result.hyper, config);
        } catch (const std::exception& e) {
            throw std::runtime_error("stream item " + std::to_string(t) + ": " + e.what());
        }
        result.stats = accumulate(std::move(result.stats), fit.posterior, result.hyper);
        result.hyper = update_gamma_hypers(result.hyper, result.stats);
        result.hyper = update_dirichlet_hypers(result.hyper, result.stats);
        HyperSnapshot snap;
        snap.step = result.stats.count;
        snap.alpha = result.hyper.alpha;
        snap.beta = result.hyper.beta;
        snap.elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.snapshots.push_back(std::move(snap));
        if (on_step) {
            on_step(static_cast<int>(t), fit.posterior, result.hyper);
        }
    }
    return result;
}

} // namespace snmf
