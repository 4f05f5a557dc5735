#include "snmf/serialize.hpp"

#include <fstream>
#include <iomanip>

namespace snmf {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw SchemaError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

void check_header(const Json& j, const std::string& kind) {
    const Json& version = field(j, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw SchemaError("unsupported schema_version " + version.dump() + " (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    const auto found = field(j, "kind").get<std::string>();
    if (found != kind) {
        throw SchemaError("expected a '" + kind + "' document, found '" + found + "'");
    }
}

Json header(const std::string& kind) {
    return Json{{"schema_version", kSchemaVersion}, {"kind", kind}};
}

Json index_matrix_to_json(const IndexMatrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> read_matrix(const Json& j) {
    if (!j.is_array()) {
        throw SchemaError("matrix must be an array of rows");
    }
    const auto rows = static_cast<Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Index>(j.front().size()) : 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw SchemaError("matrix rows must all have the same length");
        }
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = row[static_cast<std::size_t>(c)].get<Scalar>();
        }
    }
    return m;
}

Json vector_to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const Json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::array<Matrix, 2> pair_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw SchemaError("expected a pair of matrices");
    }
    return {read_matrix<double>(j[0]), read_matrix<double>(j[1])};
}

} // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) { return read_matrix<double>(j); }

Json to_json(const FactorModel& model) {
    Json j = header("model");
    j["attributes"] = model.attributes();
    j["components"] = model.components();
    j["instances"] = model.instances();
    j["theta"] = Json::array({matrix_to_json(model.atoms.theta[0]), matrix_to_json(model.atoms.theta[1])});
    j["activations"] = matrix_to_json(model.activations);
    return j;
}

FactorModel model_from_json(const Json& j) {
    check_header(j, "model");
    FactorModel m;
    m.atoms.theta = pair_from_json(field(j, "theta"));
    m.activations = matrix_from_json(field(j, "activations"));
    return m;
}

Json to_json(const PosteriorApprox& post) {
    Json j = header("posterior");
    j["alpha_hat_act"] = matrix_to_json(post.alpha_hat_act);
    j["beta_hat_act"] = matrix_to_json(post.beta_hat_act);
    j["alpha_hat_atoms"] =
        Json::array({matrix_to_json(post.alpha_hat_atoms[0]), matrix_to_json(post.alpha_hat_atoms[1])});
    return j;
}

PosteriorApprox posterior_from_json(const Json& j) {
    check_header(j, "posterior");
    PosteriorApprox p;
    p.alpha_hat_act = matrix_from_json(field(j, "alpha_hat_act"));
    p.beta_hat_act = matrix_from_json(field(j, "beta_hat_act"));
    p.alpha_hat_atoms = pair_from_json(field(j, "alpha_hat_atoms"));
    return p;
}

Json to_json(const HyperParams& hyper) {
    Json j = header("hyper");
    j["alpha"] = vector_to_json(hyper.alpha);
    j["beta"] = vector_to_json(hyper.beta);
    j["phi_map"] =
        Json::array({index_matrix_to_json(hyper.phi_map[0]), index_matrix_to_json(hyper.phi_map[1])});
    j["upsilon_map"] = index_matrix_to_json(hyper.upsilon_map);
    j["omega_map"] = index_matrix_to_json(hyper.omega_map);
    return j;
}

HyperParams hyper_from_json(const Json& j) {
    check_header(j, "hyper");
    HyperParams h;
    h.alpha = vector_from_json(field(j, "alpha"));
    h.beta = vector_from_json(field(j, "beta"));
    const Json& phi = field(j, "phi_map");
    if (!phi.is_array() || phi.size() != 2) {
        throw SchemaError("phi_map must hold two matrices");
    }
    h.phi_map = {read_matrix<int>(phi[0]), read_matrix<int>(phi[1])};
    h.upsilon_map = read_matrix<int>(field(j, "upsilon_map"));
    h.omega_map = read_matrix<int>(field(j, "omega_map"));
    return h;
}

Json to_json(const MetricRecord& r) {
    return Json{{"metric", r.metric},   {"value", r.value},     {"std", r.std},
                {"runs", r.runs},       {"dataset", r.dataset}, {"algorithm", r.algorithm}};
}

MetricRecord metric_from_json(const Json& j) {
    MetricRecord r;
    r.metric = field(j, "metric").get<std::string>();
    r.value = field(j, "value").get<double>();
    r.std = field(j, "std").get<double>();
    r.runs = field(j, "runs").get<int>();
    r.dataset = field(j, "dataset").get<std::string>();
    r.algorithm = field(j, "algorithm").get<std::string>();
    return r;
}

Json metrics_document(const std::vector<MetricRecord>& records) {
    Json j = header("metrics");
    j["records"] = Json::array();
    for (const auto& r : records) {
        j["records"].push_back(to_json(r));
    }
    return j;
}

std::vector<MetricRecord> metrics_from_json(const Json& j) {
    check_header(j, "metrics");
    std::vector<MetricRecord> out;
    for (const auto& r : field(j, "records")) {
        out.push_back(metric_from_json(r));
    }
    return out;
}

Atoms atoms_from_json(const Json& j) {
    if (j.is_object() && j.contains("kind")) {
        return model_from_json(j).atoms;
    }
    if (j.is_object() && j.contains("theta")) {
        auto theta = pair_from_json(j.at("theta"));
        return Atoms(std::move(theta[0]), std::move(theta[1]));
    }
    if (j.is_object() && j.contains("w")) {
        return split_atoms(matrix_from_json(j.at("w")));
    }
    throw SchemaError("atoms document needs 'theta' or 'w'");
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

void save_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

void write_trace_csv(const std::string& path, const FitTrace& trace) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << "iteration,objective,wall_time\n" << std::setprecision(17);
    for (std::size_t n = 0; n < trace.objective.size(); ++n) {
        out << n << ',' << trace.objective[n] << ','
            << (n < trace.wall_time.size() ? trace.wall_time[n] : 0.0) << '\n';
    }
}

} // namespace snmf
