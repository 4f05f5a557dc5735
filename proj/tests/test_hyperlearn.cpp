#include "snmf/hyperlearn.hpp"

#include "snmf/data.hpp"
#include "snmf/specfun.hpp"
#include "support.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <doctest.h>

#include <cmath>

using namespace snmf;

namespace {

double psi(double x) { return boost::math::digamma(x); }

PosteriorApprox random_posterior(const HyperParams& h, Rng& rng) {
    PosteriorApprox p;
    p.alpha_hat_act = Matrix(h.components(), h.instances());
    p.beta_hat_act = Matrix(h.components(), h.instances());
    for (Index n = 0; n < p.alpha_hat_act.size(); ++n) {
        p.alpha_hat_act.data()[n] = rng.uniform(0.5, 40.0);
        p.beta_hat_act.data()[n] = rng.uniform(0.5, 3.0);
    }
    p.alpha_hat_atoms = {Matrix(h.attributes(), h.components()), Matrix(h.attributes(), h.components())};
    for (int s = 0; s < 2; ++s) {
        for (Index n = 0; n < p.alpha_hat_atoms[s].size(); ++n) {
            p.alpha_hat_atoms[s].data()[n] = rng.uniform(0.05, 20.0);
        }
    }
    return p;
}

HyperParams neutral(Index I, Index K, Index J) {
    return HyperParams::per_coordinate({Matrix::Ones(I, K), Matrix::Ones(I, K)}, Vector::Ones(K),
                                       Vector::Constant(K, 0.001), J);
}

// gamma, delta and xi of one posterior, straight from their definitions.
SuffStats direct_terms(const PosteriorApprox& p, const HyperParams& h) {
    SuffStats out = empty_suffstats(h);
    for (Index j = 0; j < p.instances(); ++j) {
        for (Index k = 0; k < p.components(); ++k) {
            out.gamma_acc[h.upsilon_map(k, j)] += psi(p.alpha_hat_act(k, j)) - std::log(p.beta_hat_act(k, j));
            out.delta_acc[h.omega_map(k, j)] += p.alpha_hat_act(k, j) / p.beta_hat_act(k, j);
        }
    }
    for (Index k = 0; k < p.components(); ++k) {
        const double total = p.alpha_hat_atoms[0].col(k).sum() + p.alpha_hat_atoms[1].col(k).sum();
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < p.attributes(); ++i) {
                out.xi_acc[h.phi_map[s](i, k)] += psi(p.alpha_hat_atoms[s](i, k)) - psi(total);
            }
        }
    }
    return out;
}

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

struct Batch {
    HyperParams hyper;
    std::vector<PosteriorApprox> posts;
};

Batch synthetic_batch() {
    Scenario sc;
    sc.low_variance = true;
    sc.instances = 40;
    Rng rng(5);
    const HyperParams truth = scenario_hyperparams(sc, rng);
    Batch b;
    b.hyper = neutral(3, 2, 40);
    VbemConfig config;
    config.rel_tol = 1e-7;
    config.init = PosteriorInit::Jitter;
    for (int t = 0; t < 5; ++t) {
        const FactorModel m = sample_model(truth, rng);
        const Dataset d = Dataset::observed(sample_observations(m, rng), Mode::Integer);
        b.posts.push_back(vbem_fit(d, b.hyper, config).posterior);
    }
    return b;
}

} // namespace

TEST_CASE("init_suffstats uses the prior as posterior") {
    SUBCASE("single slot") {
        const HyperParams h = HyperParams::shared(1, 1, 1, 2.0, 1.0, 1.0);
        const SuffStats s = init_suffstats(h);
        CHECK(s.count == 1);
        CHECK(std::abs(s.gamma_acc[1] + kEulerGamma) <= 1e-12);
        CHECK(std::abs(s.delta_acc[0] - 1.0) <= 1e-15);
    }
    SUBCASE("uniform slots") {
        const HyperParams h = HyperParams::shared(4, 3, 10, 0.7, 2.0, 0.5);
        const SuffStats s = init_suffstats(h);
        CHECK(std::abs(s.delta_acc[0] - 30.0 * 2.0 / 0.5) <= 1e-12);
        CHECK(std::abs(s.xi_acc[0] - 3.0 * 8.0 * (psi(0.7) - psi(8.0 * 0.7))) <= 1e-11);
    }
}

TEST_CASE("accumulate") {
    const HyperParams h = neutral(3, 2, 7);
    Rng rng(1);
    std::vector<PosteriorApprox> posts;
    for (int t = 0; t < 20; ++t) {
        posts.push_back(random_posterior(h, rng));
    }

    SUBCASE("c = 1 replaces the statistics") {
        SuffStats s = init_suffstats(h);
        s.learning_rate = 1.0;
        s = accumulate(s, posts[0], h);
        const SuffStats ref = direct_terms(posts[0], h);
        CHECK(max_abs(s.gamma_acc - ref.gamma_acc) <= 1e-12);
        CHECK(max_abs(s.xi_acc - ref.xi_acc) <= 1e-12);
        CHECK(max_abs(s.delta_acc - ref.delta_acc) <= 1e-12);
    }

    SUBCASE("decaying rate reproduces the batch average") {
        SuffStats s = empty_suffstats(h);
        SuffStats sum = empty_suffstats(h);
        for (int t = 0; t < 20; ++t) {
            s = accumulate(s, posts[static_cast<std::size_t>(t)], h);
            const SuffStats d = direct_terms(posts[static_cast<std::size_t>(t)], h);
            sum.gamma_acc += d.gamma_acc;
            sum.delta_acc += d.delta_acc;
            sum.xi_acc += d.xi_acc;
            const double n = t + 1.0;
            CHECK(max_abs(s.gamma_acc - sum.gamma_acc / n) <= 1e-10);
            CHECK(max_abs(s.delta_acc - sum.delta_acc / n) <= 1e-10 * max_abs(sum.delta_acc / n));
            CHECK(max_abs(s.xi_acc - sum.xi_acc / n) <= 1e-10);
        }
        CHECK(s.count == 20);
    }

    SUBCASE("fixed rate forgets geometrically") {
        SuffStats s = empty_suffstats(h);
        s.learning_rate = 1.0;
        s = accumulate(s, posts[0], h);
        s.learning_rate = 0.02;
        for (int t = 0; t < 10; ++t) {
            s = accumulate(s, posts[0], h);
        }
        const SuffStats d = direct_terms(posts[0], h);
        CHECK(max_abs(s.gamma_acc - d.gamma_acc) <= 1e-12);

        SuffStats z = empty_suffstats(h);
        z.learning_rate = 1.0;
        z = accumulate(z, posts[0], h);
        z.learning_rate = 0.02;
        for (int t = 0; t < 10; ++t) {
            z = accumulate(z, posts[1], h);
        }
        const SuffStats d1 = direct_terms(posts[1], h);
        const Vector expected = std::pow(0.98, 10) * d.delta_acc + (1.0 - std::pow(0.98, 10)) * d1.delta_acc;
        CHECK(max_abs(z.delta_acc - expected) <= 1e-10 * max_abs(expected));
    }
}

TEST_CASE("gamma update reaches its fixed point") {
    SUBCASE("scalar posterior a_hat = 10, b_hat = 2") {
        const HyperParams h = HyperParams::shared(1, 1, 1, 1.0, 1.0, 0.5);
        SuffStats s = empty_suffstats(h);
        s.gamma_acc[1] = psi(10.0) - std::log(2.0);
        s.delta_acc[0] = 5.0;
        s.count = 1;
        const HyperParams u = update_gamma_hypers(h, s);
        const double a = u.alpha[1];
        const double b = u.beta[0];
        CHECK(std::abs(b - a / 5.0) <= 1e-9 * b);
        CHECK(std::abs(psi(a) - (std::log(b) + s.gamma_acc[1])) <= 1e-9);
        CHECK(std::abs(psi(a) - std::log(a) - (psi(10.0) - std::log(10.0))) <= 1e-9);
    }
    SUBCASE("per-component slots") {
        const HyperParams h = neutral(3, 2, 7);
        Rng rng(2);
        SuffStats s = empty_suffstats(h);
        for (int t = 0; t < 5; ++t) {
            s = accumulate(s, random_posterior(h, rng), h);
        }
        const HyperParams u = update_gamma_hypers(h, s);
        for (Index k = 0; k < 2; ++k) {
            const int a = h.upsilon_map(k, 0);
            const int b = h.omega_map(k, 0);
            CHECK(u.alpha[a] > 0.0);
            CHECK(u.beta[b] > 0.0);
            CHECK(std::abs(psi(u.alpha[a]) - (7.0 * std::log(u.beta[b]) + s.gamma_acc[a]) / 7.0) <= 1e-9);
            CHECK(std::abs(u.beta[b] - 7.0 * u.alpha[a] / s.delta_acc[b]) <= 1e-9 * u.beta[b]);
        }
        CHECK((u.alpha.head(12).array() == h.alpha.head(12).array()).all());
    }
}

TEST_CASE("Dirichlet update reaches its fixed point") {
    SUBCASE("one symmetric slot") {
        const HyperParams h = HyperParams::shared(3, 2, 4, 1.0, 1.0, 1.0);
        SuffStats s = empty_suffstats(h);
        const double target = 1.7;
        s.xi_acc[0] = 12.0 * (psi(target) - psi(6.0 * target));
        const HyperParams u = update_dirichlet_hypers(h, s);
        const double a = u.alpha[0];
        CHECK(std::abs(psi(a) - psi(6.0 * a) - s.xi_acc[0] / 12.0) <= 1e-9);
        CHECK(std::abs(a - target) <= 1e-6);
        CHECK(u.alpha[1] == h.alpha[1]);
    }
    SUBCASE("per-coordinate slots decouple by component") {
        const HyperParams h = neutral(3, 2, 7);
        Rng rng(3);
        SuffStats s = empty_suffstats(h);
        s = accumulate(s, random_posterior(h, rng), h);
        const HyperParams u = update_dirichlet_hypers(h, s);
        for (Index k = 0; k < 2; ++k) {
            double total = 0.0;
            for (int sg = 0; sg < 2; ++sg) {
                for (Index i = 0; i < 3; ++i) {
                    total += u.atom_shape(sg, i, k);
                }
            }
            for (int sg = 0; sg < 2; ++sg) {
                for (Index i = 0; i < 3; ++i) {
                    const int slot = h.phi_map[sg](i, k);
                    CHECK(std::abs(psi(u.alpha[slot]) - psi(total) - s.xi_acc[slot]) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("frozen-posterior objective matches ELBO differences and never decreases") {
    const Batch b = synthetic_batch();
    SuffStats s = empty_suffstats(b.hyper);
    for (const auto& p : b.posts) {
        s = accumulate(s, p, b.hyper);
    }
    const HyperParams g = update_gamma_hypers(b.hyper, s);
    const HyperParams gd = update_dirichlet_hypers(g, s);

    const double f0 = frozen_prior_objective(b.hyper, b.posts);
    const double f1 = frozen_prior_objective(g, b.posts);
    const double f2 = frozen_prior_objective(gd, b.posts);
    CHECK(f1 >= f0 - 1e-9 * std::abs(f0));
    CHECK(f2 >= f1 - 1e-9 * std::abs(f1));

    Scenario sc;
    sc.instances = 40;
    Rng rng(99);
    const Dataset d = Dataset::observed(sample_observations(sample_model(scenario_hyperparams(sc, rng), rng), rng),
                                        Mode::Integer);
    const double e0 = elbo(b.posts[0], d, b.hyper);
    const double e2 = elbo(b.posts[0], d, gd);
    const double p0 = frozen_prior_objective(b.hyper, {b.posts[0]});
    const double p2 = frozen_prior_objective(gd, {b.posts[0]});
    CHECK(std::abs((e2 - e0) - (p2 - p0)) <= 1e-8 * (1.0 + std::abs(e0)));
}

TEST_CASE("online learning") {
    SUBCASE("statistics equal the batch average after every prefix") {
        Scenario sc;
        sc.low_variance = true;
        sc.instances = 30;
        Rng rng(8);
        const HyperParams truth = scenario_hyperparams(sc, rng);
        std::vector<Dataset> stream;
        for (int t = 0; t < 6; ++t) {
            stream.push_back(Dataset::observed(sample_observations(sample_model(truth, rng), rng), Mode::Integer));
        }
        const HyperParams h0 = neutral(3, 2, 30);
        VbemConfig config;
        config.rel_tol = 1e-6;
        config.init = PosteriorInit::Jitter;

        SuffStats sum = init_suffstats(h0);
        int steps = 0;
        auto on_step = [&](int t, const PosteriorApprox& post, const HyperParams&) {
            const SuffStats d = direct_terms(post, h0);
            sum.gamma_acc += d.gamma_acc;
            sum.delta_acc += d.delta_acc;
            sum.xi_acc += d.xi_acc;
            steps = t + 1;
        };
        const auto result = online_learn(stream, h0, std::nullopt, config, on_step);
        CHECK(steps == 6);
        CHECK(result.stats.count == 7);
        CHECK(max_abs(result.stats.gamma_acc - sum.gamma_acc / 7.0) <= 1e-10);
        CHECK(max_abs(result.stats.xi_acc - sum.xi_acc / 7.0) <= 1e-10);
        CHECK(max_abs(result.stats.delta_acc - sum.delta_acc / 7.0) <= 1e-10 * max_abs(sum.delta_acc / 7.0));
        CHECK(result.snapshots.size() == 6);
        CHECK((result.hyper.alpha.array() > 0.0).all());
        CHECK((result.hyper.beta.array() > 0.0).all());
    }
    SUBCASE("identical datasets: relative steps shrink like 1/T") {
        const auto p = testing::random_problem(3, 2, 20, Mode::Integer, 9);
        const Dataset d = Dataset::observed(p.data.x, Mode::Integer);
        const std::vector<Dataset> stream(200, d);
        VbemConfig config;
        config.rel_tol = 1e-8;
        config.init = PosteriorInit::Jitter;
        const auto result = online_learn(stream, neutral(3, 2, 20), 0.5, config);
        auto step = [&](std::size_t t) {
            const auto& a = result.snapshots[t];
            const auto& b = result.snapshots[t - 1];
            return std::max(((a.alpha - b.alpha).array() / b.alpha.array()).abs().maxCoeff(),
                            ((a.beta - b.beta).array() / b.beta.array()).abs().maxCoeff());
        };
        CHECK(step(199) < 0.01);
        CHECK(step(199) < 0.5 * step(99));
        CHECK(step(99) < 0.5 * step(49));
    }
}
