#pragma once

// Evaluation metrics: moment errors against a ground-truth model and
// clustering accuracy under the best label matching.

#include "snmf/model.hpp"

#include <string>
#include <vector>

namespace snmf {

struct MomentErrors {
    double mse_m = 0.0;
    double mse_v = 0.0;
    /// perm[k] is the estimated component matched to true component k.
    std::vector<int> permutation;
};

/// Errors on the per-source means m_ikj = W_ik lambda_kj and variances
/// v_ikj = (theta_0 + theta_1)_ik lambda_kj, after choosing the component
/// permutation of est that minimizes mse_m (exhaustive over K!).
MomentErrors mse_moments(const FactorModel& est, const FactorModel& truth);

/// Mean squared error over atom shapes, activation shapes and activation
/// rates (read at instance 0), for hyperparameters laid out per coordinate.
/// Minimized over component permutations.
double hyper_mse(const HyperParams& est, const HyperParams& truth);

/// argmax over k of each column; ties go to the smallest k.
std::vector<int> assign_clusters(const Matrix& activations);

/// counts(t, p) = number of samples with true label t and predicted label p.
IndexMatrix confusion_matrix(const std::vector<int>& pred, const std::vector<int>& truth, int classes);

/// Maximum-weight perfect matching on a square matrix (Hungarian algorithm).
/// Returns assignment[row] = column.
std::vector<int> max_weight_assignment(const Matrix& weights);

/// Percentage of samples on the diagonal after optimally relabeling pred.
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int classes);

struct Summary {
    double mean = 0.0;
    /// Population standard deviation (divides by n).
    double std = 0.0;
    int runs = 0;
};

Summary summarize(const std::vector<double>& values);

struct MetricRecord {
    std::string metric;
    double value = 0.0;
    double std = 0.0;
    int runs = 0;
    std::string dataset;
    std::string algorithm;
};

} // namespace snmf
