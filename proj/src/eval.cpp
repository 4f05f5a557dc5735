#include "snmf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace snmf {

namespace {

// Mean squared difference between the per-source moments of truth and est,
// with est component perm[k] playing the role of true component k.
std::pair<double, double> moment_errors(const FactorModel& est, const FactorModel& truth,
                                        const std::vector<int>& perm) {
    const Index I = truth.attributes();
    const Index K = truth.components();
    const Index J = truth.instances();
    double sm = 0.0;
    double sv = 0.0;
    for (Index k = 0; k < K; ++k) {
        const Index p = perm[static_cast<std::size_t>(k)];
        for (Index i = 0; i < I; ++i) {
            const double w = truth.atoms.theta[0](i, k) - truth.atoms.theta[1](i, k);
            const double u = truth.atoms.theta[0](i, k) + truth.atoms.theta[1](i, k);
            const double w_hat = est.atoms.theta[0](i, p) - est.atoms.theta[1](i, p);
            const double u_hat = est.atoms.theta[0](i, p) + est.atoms.theta[1](i, p);
            for (Index j = 0; j < J; ++j) {
                const double l = truth.activations(k, j);
                const double l_hat = est.activations(p, j);
                const double dm = w * l - w_hat * l_hat;
                const double dv = u * l - u_hat * l_hat;
                sm += dm * dm;
                sv += dv * dv;
            }
        }
    }
    const double n = static_cast<double>(I * K * J);
    return {sm / n, sv / n};
}

} // namespace

MomentErrors mse_moments(const FactorModel& est, const FactorModel& truth) {
    if (est.attributes() != truth.attributes() || est.components() != truth.components() ||
        est.instances() != truth.instances()) {
        throw std::invalid_argument("mse_moments: models differ in shape");
    }
    std::vector<int> perm(static_cast<std::size_t>(truth.components()));
    std::iota(perm.begin(), perm.end(), 0);
    MomentErrors best;
    best.mse_m = std::numeric_limits<double>::infinity();
    do {
        const auto [m, v] = moment_errors(est, truth, perm);
        if (m < best.mse_m) {
            best.mse_m = m;
            best.mse_v = v;
            best.permutation = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double hyper_mse(const HyperParams& est, const HyperParams& truth) {
    const Index I = truth.attributes();
    const Index K = truth.components();
    if (est.attributes() != I || est.components() != K || est.instances() < 1 || truth.instances() < 1) {
        throw std::invalid_argument("hyper_mse: hyperparameter layouts differ");
    }
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double sum = 0.0;
        for (Index k = 0; k < K; ++k) {
            const Index p = perm[static_cast<std::size_t>(k)];
            for (int s = 0; s < 2; ++s) {
                for (Index i = 0; i < I; ++i) {
                    const double d = est.atom_shape(s, i, p) - truth.atom_shape(s, i, k);
                    sum += d * d;
                }
            }
            const double da = est.act_shape(p, 0) - truth.act_shape(k, 0);
            const double db = est.act_rate(p, 0) - truth.act_rate(k, 0);
            sum += da * da + db * db;
        }
        best = std::min(best, sum / static_cast<double>(K * (2 * I + 2)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::vector<int> assign_clusters(const Matrix& activations) {
    std::vector<int> labels(static_cast<std::size_t>(activations.cols()), 0);
    for (Index j = 0; j < activations.cols(); ++j) {
        Index best = 0;
        for (Index k = 1; k < activations.rows(); ++k) {
            if (activations(k, j) > activations(best, j)) {
                best = k;
            }
        }
        labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
    }
    return labels;
}

IndexMatrix confusion_matrix(const std::vector<int>& pred, const std::vector<int>& truth, int classes) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("confusion_matrix: label vectors differ in length");
    }
    IndexMatrix counts = IndexMatrix::Zero(classes, classes);
    for (std::size_t n = 0; n < pred.size(); ++n) {
        if (pred[n] < 0 || pred[n] >= classes || truth[n] < 0 || truth[n] >= classes) {
            throw std::out_of_range("confusion_matrix: label out of range at sample " +
                                    std::to_string(n));
        }
        ++counts(truth[n], pred[n]);
    }
    return counts;
}

// Shortest augmenting path formulation with row/column potentials, 1-based
// internally.
std::vector<int> max_weight_assignment(const Matrix& weights) {
    const Index n = weights.rows();
    if (weights.cols() != n) {
        throw std::invalid_argument("max_weight_assignment: matrix must be square");
    }
    if (n == 0) {
        return {};
    }
    const double top = weights.maxCoeff();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<Index> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (Index row = 1; row <= n; ++row) {
        match[0] = row;
        Index col0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const Index r = match[col0];
            double delta = inf;
            Index col1 = 0;
            for (Index c = 1; c <= n; ++c) {
                if (used[c]) {
                    continue;
                }
                const double cost = (top - weights(r - 1, c - 1)) - u[r] - v[c];
                if (cost < minv[c]) {
                    minv[c] = cost;
                    way[c] = col0;
                }
                if (minv[c] < delta) {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for (Index c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const Index col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (Index c = 1; c <= n; ++c) {
        assignment[static_cast<std::size_t>(match[c] - 1)] = static_cast<int>(c - 1);
    }
    return assignment;
}

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int classes) {
    if (truth.empty()) {
        throw std::invalid_argument("clustering_accuracy: no samples");
    }
    const IndexMatrix counts = confusion_matrix(pred, truth, classes);
    const auto assignment = max_weight_assignment(counts.cast<double>());
    long matched = 0;
    for (int t = 0; t < classes; ++t) {
        matched += counts(t, assignment[static_cast<std::size_t>(t)]);
    }
    return 100.0 * static_cast<double>(matched) / static_cast<double>(truth.size());
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.runs = static_cast<int>(values.size());
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.runs;
    double ss = 0.0;
    for (double x : values) {
        ss += (x - s.mean) * (x - s.mean);
    }
    s.std = std::sqrt(ss / s.runs);
    return s;
}

} // namespace snmf
