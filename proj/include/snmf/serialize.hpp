#pragma once

// JSON persistence. Every document carries "schema_version" and "kind";
// readers reject anything else with SchemaError. Matrices are stored as
// arrays of rows.

#include "snmf/em.hpp"
#include "snmf/eval.hpp"
#include "snmf/model.hpp"
#include "snmf/vbem.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace snmf {

inline constexpr int kSchemaVersion = 1;

class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const FactorModel& model);
Json to_json(const PosteriorApprox& post);
Json to_json(const HyperParams& hyper);
Json to_json(const MetricRecord& record);

FactorModel model_from_json(const Json& j);
PosteriorApprox posterior_from_json(const Json& j);
HyperParams hyper_from_json(const Json& j);
MetricRecord metric_from_json(const Json& j);

/// {"schema_version", "kind": "metrics", "records": [...]}.
Json metrics_document(const std::vector<MetricRecord>& records);
std::vector<MetricRecord> metrics_from_json(const Json& j);

/// Atoms from a model document, or from a bare {"theta": [t0, t1]} or
/// {"w": W} object (W split into its positive and negative parts).
Atoms atoms_from_json(const Json& j);

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

/// iteration,objective,wall_time
void write_trace_csv(const std::string& path, const FitTrace& trace);

} // namespace snmf
