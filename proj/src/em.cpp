#include "snmf/em.hpp"

#include "snmf/kernels.hpp"
#include "snmf/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace snmf {

namespace {

// (a - 1) ln v with the convention 0 * ln 0 = 0 for flat priors.
double log_prior_term(double shape, double v) {
    const double a = shape - 1.0;
    return a == 0.0 ? 0.0 : a * std::log(v);
}

void require_valid(const FactorModel* model, const HyperParams& hyper, const Dataset& data) {
    const auto violations = validate(model, &hyper, &data);
    if (!violations.empty()) {
        throw std::invalid_argument(violations.front().kind + ": " + violations.front().message);
    }
}

} // namespace

double resolve_epsilon(const EmConfig& config, const HyperParams& hyper) {
    if (config.epsilon_floor) {
        return *config.epsilon_floor;
    }
    return hyper.min_shape() < 1.0 ? 1e-12 : 0.0;
}

double em_objective(const FactorModel& model, const Dataset& data, const HyperParams& hyper) {
    if (model.attributes() != data.attributes() || model.instances() != data.instances()) {
        throw std::invalid_argument("em_objective: model and data dimensions differ");
    }
    const auto& theta = model.atoms.theta;
    const Matrix& lambda = model.activations;
    double f = kernels::data_fit(theta, lambda, data);
    for (Index j = 0; j < lambda.cols(); ++j) {
        for (Index k = 0; k < lambda.rows(); ++k) {
            f += log_prior_term(hyper.act_shape(k, j), lambda(k, j)) -
                 hyper.act_rate(k, j) * lambda(k, j);
        }
    }
    for (int s = 0; s < 2; ++s) {
        for (Index k = 0; k < theta[s].cols(); ++k) {
            for (Index i = 0; i < theta[s].rows(); ++i) {
                f += log_prior_term(hyper.atom_shape(s, i, k), theta[s](i, k));
            }
        }
    }
    return f;
}

EmState em_step(EmState state, const Dataset& data, const HyperParams& hyper,
                const EmConfig& config) {
    const double eps = resolve_epsilon(config, hyper);
    auto& theta = state.model.atoms.theta;
    Matrix& lambda = state.model.activations;
    const auto counts = config.serial_kernels
                            ? kernels::serial::expected_counts(theta, lambda, data)
                            : kernels::expected_counts(theta, lambda, data);

    if (config.update_activations) {
        for (Index j = 0; j < lambda.cols(); ++j) {
            for (Index k = 0; k < lambda.rows(); ++k) {
                const double v = counts.act(k, j) + hyper.act_shape(k, j) - 1.0;
                lambda(k, j) = std::max(v, eps) / (1.0 + hyper.act_rate(k, j));
            }
        }
    }
    if (config.update_atoms) {
        const Index I = theta[0].rows();
        for (Index k = 0; k < theta[0].cols(); ++k) {
            double total = 0.0;
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < I; ++i) {
                    const double v = counts.atoms[s](i, k) + hyper.atom_shape(s, i, k) - 1.0;
                    theta[s](i, k) = std::max(v, eps);
                    total += theta[s](i, k);
                }
            }
            if (!(total > 0.0) || !std::isfinite(total)) {
                throw NumericalFailure("atom column " + std::to_string(k) + " cannot be normalized",
                                       state.iteration + 1);
            }
            theta[0].col(k) /= total;
            theta[1].col(k) /= total;
        }
    }

    ++state.iteration;
    const double f = em_objective(state.model, data, hyper);
    if (!std::isfinite(f)) {
        throw NumericalFailure("EM objective is not finite", state.iteration);
    }
    state.objective_trace.push_back(f);
    return state;
}

FactorModel initial_model(const Dataset& data, const HyperParams& hyper, Index components,
                          InitStrategy strategy, std::uint64_t seed) {
    const Index I = data.attributes();
    const Index J = data.instances();
    const Index K = components;
    if (K < 1) {
        throw std::invalid_argument("initial_model: need at least one component");
    }
    FactorModel m;
    m.atoms.theta = {Matrix(I, K), Matrix(I, K)};
    m.activations = Matrix(K, J);

    if (strategy == InitStrategy::Prior) {
        for (Index k = 0; k < K; ++k) {
            double total = 0.0;
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < I; ++i) {
                    total += hyper.atom_shape(s, i, k);
                }
            }
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < I; ++i) {
                    m.atoms.theta[s](i, k) = hyper.atom_shape(s, i, k) / total;
                }
            }
            for (Index j = 0; j < J; ++j) {
                m.activations(k, j) = hyper.act_shape(k, j) / (1.0 + hyper.act_rate(k, j));
            }
        }
        return m;
    }

    Rng rng(seed);
    const std::vector<double> ones(static_cast<std::size_t>(2 * I), 1.0);
    for (Index k = 0; k < K; ++k) {
        const auto draw = rng.dirichlet(ones);
        for (Index i = 0; i < I; ++i) {
            m.atoms.theta[0](i, k) = draw[static_cast<std::size_t>(i)];
            m.atoms.theta[1](i, k) = draw[static_cast<std::size_t>(I + i)];
        }
    }
    double sum = 0.0;
    Index n = 0;
    for (Index j = 0; j < J; ++j) {
        for (Index i = 0; i < I; ++i) {
            if (data.mask.observed(i, j)) {
                sum += std::abs(data.x(i, j)) + 1.0;
                ++n;
            }
        }
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 1.0;
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            m.activations(k, j) = rng.gamma(1.0, 1.0 / mean);
        }
    }
    return m;
}

EmFit em_fit(const Dataset& data, const HyperParams& hyper, const EmConfig& config,
             const std::optional<FactorModel>& init) {
    EmState state;
    state.model = init ? *init
                       : initial_model(data, hyper, hyper.components(), config.init, config.seed);
    require_valid(&state.model, hyper, data);

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    EmFit fit;
    const double f0 = em_objective(state.model, data, hyper);
    if (!std::isfinite(f0)) {
        throw NumericalFailure("EM objective is not finite at the starting point", 0);
    }
    state.objective_trace.push_back(f0);
    fit.trace.wall_time.push_back(elapsed());

    while (state.iteration < config.max_iters) {
        state = em_step(std::move(state), data, hyper, config);
        fit.trace.wall_time.push_back(elapsed());
        const double prev = state.objective_trace[state.objective_trace.size() - 2];
        const double cur = state.objective_trace.back();
        if (std::abs(cur - prev) / (std::abs(cur) + 1.0) < config.rel_tol) {
            fit.converged = true;
            break;
        }
    }
    fit.model = std::move(state.model);
    fit.trace.objective = std::move(state.objective_trace);
    fit.iterations = state.iteration;
    return fit;
}

} // namespace snmf
