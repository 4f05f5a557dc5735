#include "snmf/kernels.hpp"

#include "snmf/distributions.hpp"
#include "snmf/divergence.hpp"
#include "snmf/specfun.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace snmf::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_shapes(const std::array<Matrix, 2>& atoms, const Matrix& act, const Dataset& data) {
    if (atoms[0].rows() != data.x.rows() || atoms[1].rows() != data.x.rows() ||
        atoms[0].cols() != act.rows() || atoms[1].cols() != act.rows() ||
        act.cols() != data.x.cols() || data.mask.rows() != data.x.rows() ||
        data.mask.cols() != data.x.cols()) {
        throw std::invalid_argument("kernels: factor shapes do not match the data");
    }
}

// Collects the first exception raised inside a parallel region so it can be
// rethrown once the region has joined.
class RegionErrors {
  public:
    template <typename F>
    void guard(F&& f) {
        if (failed_.load(std::memory_order_relaxed)) {
            return;
        }
        try {
            f();
        } catch (const ImpossibleModel& e) {
            record(e.what(), true);
        } catch (const std::exception& e) {
            record(e.what(), false);
        }
    }

    void rethrow() const {
        if (!failed_) {
            return;
        }
        if (impossible_) {
            throw ImpossibleModel(message_);
        }
        throw std::runtime_error(message_);
    }

  private:
    void record(const char* what, bool impossible) {
#pragma omp critical(snmf_region_errors)
        {
            if (!failed_) {
                message_ = what;
                impossible_ = impossible;
                failed_ = true;
            }
        }
    }

    std::atomic<bool> failed_{false};
    bool impossible_ = false;
    std::string message_;
};

// Sum over columns with one partial per thread, combined in thread order.
template <typename ColumnTerm>
double column_sum(Index cols, ColumnTerm&& term) {
    const int threads = omp_get_max_threads();
    std::vector<double> partial(static_cast<std::size_t>(threads), 0.0);
    RegionErrors errors;
#pragma omp parallel num_threads(threads)
    {
        double local = 0.0;
#pragma omp for schedule(static)
        for (Index j = 0; j < cols; ++j) {
            errors.guard([&] { local += term(j); });
        }
        partial[static_cast<std::size_t>(omp_get_thread_num())] = local;
    }
    errors.rethrow();
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

} // namespace

std::array<double, 2> cell_multipliers(double x, double lambda_bar0, double lambda_bar1,
                                       Mode mode) {
    const double lb[2] = {lambda_bar0, lambda_bar1};
    const double ax = std::abs(x);
    // Denominator of the cross term, shared by both s.
    double denom = 0.0;
    if (mode == Mode::Integer) {
        denom = posterior_denominator(ax, lambda_bar0 * lambda_bar1);
    } else {
        denom = 0.5 * (ax + std::sqrt(x * x + 4.0 * lambda_bar0 * lambda_bar1));
    }
    std::array<double, 2> u{0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
        const double part = signed_part(x, s);
        if (lb[s] == 0.0) {
            if (part > 0.0) {
                throw ImpossibleModel("observed value " + std::to_string(x) +
                                      " has a zero rate on its sign");
            }
            continue;
        }
        u[s] = (part > 0.0 ? part / lb[s] : 0.0) + lb[1 - s] / denom;
    }
    return u;
}

std::array<double, 2> cell_log_multipliers(double x, double log_lambda_bar0,
                                           double log_lambda_bar1, Mode mode) {
    const double ll[2] = {log_lambda_bar0, log_lambda_bar1};
    const double ax = std::abs(x);
    double log_denom = 0.0;
    if (mode == Mode::Integer) {
        log_denom = std::log(posterior_denominator(ax, std::exp(ll[0] + ll[1])));
    } else if (ax > 0.0) {
        log_denom = std::log(0.5 * (ax + std::sqrt(x * x + 4.0 * std::exp(ll[0] + ll[1]))));
    } else {
        log_denom = 0.5 * (ll[0] + ll[1]);
    }
    std::array<double, 2> lu{kNegInf, kNegInf};
    for (int s = 0; s < 2; ++s) {
        const double part = signed_part(x, s);
        if (ll[s] == kNegInf) {
            if (part > 0.0) {
                throw ImpossibleModel("observed value " + std::to_string(x) +
                                      " has a zero rate on its sign");
            }
            continue;
        }
        const double direct = part > 0.0 ? std::log(part) - ll[s] : kNegInf;
        const double cross = ll[1 - s] == kNegInf ? kNegInf : ll[1 - s] - log_denom;
        lu[s] = log_add_exp(direct, cross);
    }
    return lu;
}

double cell_fit(double x, double lambda_bar0, double lambda_bar1, Mode mode) {
    if (mode == Mode::Integer) {
        return skellam_log_pmf(std::llround(x), {lambda_bar0, lambda_bar1});
    }
    return -skellam_divergence({x, lambda_bar0, lambda_bar1});
}

double cell_fit_log(double x, double log_lambda_bar0, double log_lambda_bar1, Mode mode) {
    if (mode == Mode::Integer) {
        return skellam_log_pmf_from_logs(x, log_lambda_bar0, log_lambda_bar1);
    }
    return -skellam_divergence_from_logs(x, log_lambda_bar0, log_lambda_bar1);
}

ExpectedCounts expected_counts(const std::array<Matrix, 2>& atoms, const Matrix& act,
                               const Dataset& data) {
    check_shapes(atoms, act, data);
    const Index I = data.x.rows();
    const Index K = act.rows();
    const Index J = data.x.cols();
    const std::array<Matrix, 2> lb{atoms[0] * act, atoms[1] * act};

    ExpectedCounts out;
    out.act.resize(K, J);
    const int threads = omp_get_max_threads();
    std::vector<std::array<Matrix, 2>> partial(static_cast<std::size_t>(threads));
    RegionErrors errors;
#pragma omp parallel num_threads(threads)
    {
        auto& acc = partial[static_cast<std::size_t>(omp_get_thread_num())];
        acc = {Matrix::Zero(I, K), Matrix::Zero(I, K)};
        Vector u0(I), u1(I);
#pragma omp for schedule(static)
        for (Index j = 0; j < J; ++j) {
            errors.guard([&] {
                for (Index i = 0; i < I; ++i) {
                    if (data.mask.observed(i, j)) {
                        const auto u = cell_multipliers(data.x(i, j), lb[0](i, j), lb[1](i, j),
                                                        data.mode);
                        u0[i] = u[0];
                        u1[i] = u[1];
                    } else {
                        u0[i] = 1.0;
                        u1[i] = 1.0;
                    }
                }
                out.act.col(j) = act.col(j).cwiseProduct(atoms[0].transpose() * u0 +
                                                         atoms[1].transpose() * u1);
                acc[0].noalias() += u0 * act.col(j).transpose();
                acc[1].noalias() += u1 * act.col(j).transpose();
            });
        }
    }
    errors.rethrow();
    for (int s = 0; s < 2; ++s) {
        Matrix total = Matrix::Zero(I, K);
        for (const auto& p : partial) {
            total += p[static_cast<std::size_t>(s)];
        }
        out.atoms[static_cast<std::size_t>(s)] = atoms[static_cast<std::size_t>(s)].cwiseProduct(total);
    }
    return out;
}

std::array<Matrix, 2> log_rates(const std::array<Matrix, 2>& log_atoms, const Matrix& log_act) {
    const Index I = log_atoms[0].rows();
    const Index K = log_act.rows();
    const Index J = log_act.cols();
    std::array<Matrix, 2> out{Matrix(I, J), Matrix(I, J)};
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < J; ++j) {
        for (int s = 0; s < 2; ++s) {
            const auto& a = log_atoms[static_cast<std::size_t>(s)];
            for (Index i = 0; i < I; ++i) {
                double hi = kNegInf;
                for (Index k = 0; k < K; ++k) {
                    hi = std::max(hi, a(i, k) + log_act(k, j));
                }
                if (hi == kNegInf) {
                    out[static_cast<std::size_t>(s)](i, j) = kNegInf;
                    continue;
                }
                double sum = 0.0;
                for (Index k = 0; k < K; ++k) {
                    sum += std::exp(a(i, k) + log_act(k, j) - hi);
                }
                out[static_cast<std::size_t>(s)](i, j) = hi + std::log(sum);
            }
        }
    }
    return out;
}

ExpectedCounts expected_counts_log(const std::array<Matrix, 2>& log_atoms, const Matrix& log_act,
                                   const Dataset& data) {
    check_shapes(log_atoms, log_act, data);
    const Index I = data.x.rows();
    const Index K = log_act.rows();
    const Index J = data.x.cols();
    const auto ll = log_rates(log_atoms, log_act);

    ExpectedCounts out;
    out.act.resize(K, J);
    const int threads = omp_get_max_threads();
    std::vector<std::array<Matrix, 2>> partial(static_cast<std::size_t>(threads));
    RegionErrors errors;
#pragma omp parallel num_threads(threads)
    {
        auto& acc = partial[static_cast<std::size_t>(omp_get_thread_num())];
        acc = {Matrix::Zero(I, K), Matrix::Zero(I, K)};
        Matrix lu(2, I);
#pragma omp for schedule(static)
        for (Index j = 0; j < J; ++j) {
            errors.guard([&] {
                for (Index i = 0; i < I; ++i) {
                    if (data.mask.observed(i, j)) {
                        const auto u =
                            cell_log_multipliers(data.x(i, j), ll[0](i, j), ll[1](i, j), data.mode);
                        lu(0, i) = u[0];
                        lu(1, i) = u[1];
                    } else {
                        lu(0, i) = 0.0;
                        lu(1, i) = 0.0;
                    }
                }
                for (Index k = 0; k < K; ++k) {
                    double total = 0.0;
                    for (int s = 0; s < 2; ++s) {
                        const auto& a = log_atoms[static_cast<std::size_t>(s)];
                        auto& dst = acc[static_cast<std::size_t>(s)];
                        for (Index i = 0; i < I; ++i) {
                            const double e = std::exp(a(i, k) + log_act(k, j) + lu(s, i));
                            total += e;
                            dst(i, k) += e;
                        }
                    }
                    out.act(k, j) = total;
                }
            });
        }
    }
    errors.rethrow();
    for (int s = 0; s < 2; ++s) {
        Matrix total = Matrix::Zero(I, K);
        for (const auto& p : partial) {
            total += p[static_cast<std::size_t>(s)];
        }
        out.atoms[static_cast<std::size_t>(s)] = std::move(total);
    }
    return out;
}

double data_fit(const std::array<Matrix, 2>& atoms, const Matrix& act, const Dataset& data) {
    check_shapes(atoms, act, data);
    const std::array<Matrix, 2> lb{atoms[0] * act, atoms[1] * act};
    const Index I = data.x.rows();
    return column_sum(data.x.cols(), [&](Index j) {
        double sum = 0.0;
        for (Index i = 0; i < I; ++i) {
            if (data.mask.observed(i, j)) {
                sum += cell_fit(data.x(i, j), lb[0](i, j), lb[1](i, j), data.mode);
            }
        }
        return sum;
    });
}

double data_fit_log(const std::array<Matrix, 2>& log_atoms, const Matrix& log_act,
                    const Dataset& data) {
    check_shapes(log_atoms, log_act, data);
    const auto ll = log_rates(log_atoms, log_act);
    const Index I = data.x.rows();
    return column_sum(data.x.cols(), [&](Index j) {
        double sum = 0.0;
        for (Index i = 0; i < I; ++i) {
            if (data.mask.observed(i, j)) {
                sum += cell_fit_log(data.x(i, j), ll[0](i, j), ll[1](i, j), data.mode);
            }
        }
        return sum;
    });
}

} // namespace snmf::kernels
