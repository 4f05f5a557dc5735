#pragma once

// Dataset ingestion and synthetic generation.

#include "snmf/model.hpp"
#include "snmf/random.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace snmf {

/// CSV problem with the 1-based line where it was found (0 when the file
/// could not be opened).
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

enum class Uncertainty { Low, High };

struct Scenario {
    Uncertainty uncertainty = Uncertainty::Low;
    bool low_variance = false;
    Index attributes = 3;
    Index components = 2;
    Index instances = 5000;
    double activation_mean = 300.0;
    std::uint64_t seed = 0;
};

struct LabeledDataset {
    Dataset dataset;
    /// Class index per instance, 0-based and contiguous.
    std::optional<std::vector<int>> labels;
    /// Original class names, position = class index.
    std::vector<std::string> class_names;
    std::string name;

    int classes() const { return static_cast<int>(class_names.size()); }
};

struct SyntheticBundle {
    LabeledDataset data;
    FactorModel truth;
    HyperParams hyper;
};

/// Per-coordinate hyperparameters of the scenario.
HyperParams scenario_hyperparams(const Scenario& scenario, Rng& rng);

/// theta ~ Dirichlet and lambda ~ Gamma under the given hyperparameters.
FactorModel sample_model(const HyperParams& hyper, Rng& rng);

/// Draws theta ~ Dirichlet, lambda ~ Gamma and X ~ Skellam(theta lambda)
/// from the scenario's priors.
SyntheticBundle generate_synthetic(const Scenario& scenario);

/// Integer observations X_ij ~ Skellam(lambda-bar_0ij, lambda-bar_1ij).
Matrix sample_observations(const FactorModel& model, Rng& rng);

enum class Orientation { InstancesAsRows, InstancesAsColumns };

struct CsvOptions {
    bool has_header = false;
    /// Column holding class labels (0-based, before transposition); -1 for
    /// the last column.
    std::optional<int> label_column;
    Orientation orientation = Orientation::InstancesAsRows;
    /// Overrides the inferred mode.
    std::optional<Mode> mode;
    /// Standardize each attribute to zero mean and unit variance.
    bool zscore = false;
};

LabeledDataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Writes X with instances as rows, labels (when present) as the last column.
void save_csv(const std::string& path, const LabeledDataset& data);

/// Drops floor(fraction * I * J) cells, chosen uniformly, from the mask.
Dataset mask_random(const Dataset& data, double fraction, std::uint64_t seed);

/// Breiman's waveform generator (21 attributes, 3 classes).
LabeledDataset generate_waveform(Index instances, std::uint64_t seed);

} // namespace snmf
