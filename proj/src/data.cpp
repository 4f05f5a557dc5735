#include "snmf/data.hpp"

#include "snmf/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace snmf {

namespace {

constexpr double kLowVarianceShape = 0.02;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(trim(field));
    return out;
}

bool parse_number(const std::string& text, double& value) {
    if (text.empty()) {
        return false;
    }
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

HyperParams scenario_hyperparams(const Scenario& scenario, Rng& rng) {
    const Index I = scenario.attributes;
    const Index K = scenario.components;
    if (I < 1 || K < 1 || scenario.instances < 1 || !(scenario.activation_mean > 0.0)) {
        throw std::invalid_argument("scenario: dimensions and activation mean must be positive");
    }
    const bool low = scenario.uncertainty == Uncertainty::Low;
    const double lo = low ? 1.0 : 0.5;
    const double hi = low ? 10.0 : 1.0;
    std::array<Matrix, 2> alpha_atoms{Matrix(I, K), Matrix(I, K)};
    for (Index k = 0; k < K; ++k) {
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                alpha_atoms[s](i, k) = rng.uniform(lo, hi);
            }
        }
        if (scenario.low_variance) {
            for (Index i = 0; i < I; ++i) {
                alpha_atoms[rng.below(2)](i, k) = kLowVarianceShape;
            }
        }
    }
    const double anchor[2] = {low ? 5.0 : 0.8, low ? 50.0 : 0.5};
    Vector alpha_act(K);
    Vector beta_act(K);
    for (Index k = 0; k < K; ++k) {
        alpha_act[k] = k < 2 ? anchor[k]
                             : rng.uniform(std::min(anchor[0], anchor[1]), std::max(anchor[0], anchor[1]));
        beta_act[k] = alpha_act[k] / scenario.activation_mean;
    }
    return HyperParams::per_coordinate(alpha_atoms, alpha_act, beta_act, scenario.instances);
}

Matrix sample_observations(const FactorModel& model, Rng& rng) {
    const auto rec = reconstruct(model);
    Matrix x(model.attributes(), model.instances());
    for (Index j = 0; j < x.cols(); ++j) {
        for (Index i = 0; i < x.rows(); ++i) {
            x(i, j) = static_cast<double>(
                skellam_sample({rec.lambda_bar[0](i, j), rec.lambda_bar[1](i, j)}, rng));
        }
    }
    return x;
}

FactorModel sample_model(const HyperParams& hyper, Rng& rng) {
    const Index I = hyper.attributes();
    const Index K = hyper.components();
    const Index J = hyper.instances();
    FactorModel m;
    m.atoms.theta = {Matrix(I, K), Matrix(I, K)};
    std::vector<double> conc(static_cast<std::size_t>(2 * I));
    for (Index k = 0; k < K; ++k) {
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                conc[static_cast<std::size_t>(s * I + i)] = hyper.atom_shape(s, i, k);
            }
        }
        const auto draw = rng.dirichlet(conc);
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                m.atoms.theta[s](i, k) = draw[static_cast<std::size_t>(s * I + i)];
            }
        }
    }
    m.activations.resize(K, J);
    for (Index j = 0; j < J; ++j) {
        for (Index k = 0; k < K; ++k) {
            m.activations(k, j) = rng.gamma(hyper.act_shape(k, j), hyper.act_rate(k, j));
        }
    }
    return m;
}

SyntheticBundle generate_synthetic(const Scenario& scenario) {
    Rng rng(scenario.seed);
    SyntheticBundle out;
    out.hyper = scenario_hyperparams(scenario, rng);
    out.truth = sample_model(out.hyper, rng);
    out.data.dataset = Dataset::observed(sample_observations(out.truth, rng), Mode::Integer);
    out.data.name = std::string("synthetic-") +
                    (scenario.uncertainty == Uncertainty::Low ? "low" : "high") +
                    (scenario.low_variance ? "-lowvar" : "");
    return out;
}

LabeledDataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open file");
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_of;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto fields = split_fields(line);
        if (!rows.empty() && fields.size() != rows.front().size()) {
            throw ParseError(path, line_no,
                             "expected " + std::to_string(rows.front().size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        rows.push_back(std::move(fields));
        line_of.push_back(line_no);
    }
    if (rows.empty()) {
        throw ParseError(path, line_no, "no data rows");
    }

    const bool by_rows = options.orientation == Orientation::InstancesAsRows;
    const Index n_rows = static_cast<Index>(rows.size());
    const Index n_cols = static_cast<Index>(rows.front().size());
    // Labels live in a column when instances are rows, in a row otherwise.
    std::optional<Index> label_at;
    if (options.label_column) {
        const Index extent = by_rows ? n_cols : n_rows;
        const Index at = *options.label_column < 0 ? extent + *options.label_column : *options.label_column;
        if (at < 0 || at >= extent) {
            throw ParseError(path, 0, "label index out of range");
        }
        label_at = at;
    }

    std::vector<std::string> raw_labels;
    std::vector<std::vector<double>> values;
    for (Index r = 0; r < n_rows; ++r) {
        if (!by_rows && label_at && r == *label_at) {
            raw_labels = rows[static_cast<std::size_t>(r)];
            continue;
        }
        std::vector<double> vals;
        for (Index c = 0; c < n_cols; ++c) {
            const auto& cell = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (by_rows && label_at && c == *label_at) {
                raw_labels.push_back(cell);
                continue;
            }
            double v = 0.0;
            if (!parse_number(cell, v)) {
                throw ParseError(path, line_of[static_cast<std::size_t>(r)],
                                 "field " + std::to_string(c + 1) + " is not a number: '" + cell + "'");
            }
            vals.push_back(v);
        }
        values.push_back(std::move(vals));
    }

    // values[r][c]; instances are r when by_rows.
    const Index outer = static_cast<Index>(values.size());
    const Index inner = outer > 0 ? static_cast<Index>(values.front().size()) : 0;
    Matrix x = by_rows ? Matrix(inner, outer) : Matrix(outer, inner);
    for (Index r = 0; r < outer; ++r) {
        for (Index c = 0; c < inner; ++c) {
            const double v = values[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (by_rows) {
                x(c, r) = v;
            } else {
                x(r, c) = v;
            }
        }
    }

    if (options.zscore) {
        for (Index i = 0; i < x.rows(); ++i) {
            const double mean = x.row(i).mean();
            x.row(i).array() -= mean;
            const double sd = std::sqrt(x.row(i).squaredNorm() / static_cast<double>(x.cols()));
            if (sd > 0.0) {
                x.row(i) /= sd;
            }
        }
    }

    bool integral = true;
    for (Index n = 0; n < x.size() && integral; ++n) {
        integral = std::floor(x.data()[n]) == x.data()[n];
    }
    const Mode mode = options.mode ? *options.mode : (integral ? Mode::Integer : Mode::RealLimit);

    LabeledDataset out;
    out.dataset = Dataset::observed(std::move(x), mode);
    const auto slash = path.find_last_of('/');
    out.name = slash == std::string::npos ? path : path.substr(slash + 1);
    if (label_at) {
        const std::set<std::string> names(raw_labels.begin(), raw_labels.end());
        out.class_names.assign(names.begin(), names.end());
        std::map<std::string, int> index;
        for (std::size_t c = 0; c < out.class_names.size(); ++c) {
            index[out.class_names[c]] = static_cast<int>(c);
        }
        std::vector<int> labels;
        labels.reserve(raw_labels.size());
        for (const auto& l : raw_labels) {
            labels.push_back(index[l]);
        }
        out.labels = std::move(labels);
    }
    return out;
}

void save_csv(const std::string& path, const LabeledDataset& data) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    const Matrix& x = data.dataset.x;
    for (Index j = 0; j < x.cols(); ++j) {
        for (Index i = 0; i < x.rows(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << format_number(x(i, j));
        }
        if (data.labels) {
            const int l = (*data.labels)[static_cast<std::size_t>(j)];
            out << ',' << (data.class_names.empty() ? std::to_string(l)
                                                    : data.class_names[static_cast<std::size_t>(l)]);
        }
        out << '\n';
    }
}

Dataset mask_random(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("mask_random: fraction must lie in [0, 1]");
    }
    const Index rows = data.x.rows();
    const Index cols = data.x.cols();
    std::vector<std::uint8_t> grid = data.mask.to_grid();
    std::vector<Index> observed;
    for (Index n = 0; n < rows * cols; ++n) {
        if (grid[static_cast<std::size_t>(n)]) {
            observed.push_back(n);
        }
    }
    const auto target = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(rows * cols)));
    const std::size_t drop = std::min(target, observed.size());
    Rng rng(seed);
    // Partial Fisher-Yates: the first `drop` entries become the removed cells.
    for (std::size_t n = 0; n < drop; ++n) {
        const std::size_t pick = n + rng.below(observed.size() - n);
        std::swap(observed[n], observed[pick]);
        grid[static_cast<std::size_t>(observed[n])] = 0;
    }
    Dataset out = data;
    out.mask = Mask::from_grid(rows, cols, grid);
    return out;
}

LabeledDataset generate_waveform(Index instances, std::uint64_t seed) {
    constexpr Index kAttributes = 21;
    auto h1 = [](Index i) { return std::max(6.0 - std::abs(static_cast<double>(i) - 7.0), 0.0); };
    auto base = [&](int wave, Index i) {
        switch (wave) {
        case 0:
            return h1(i);
        case 1:
            return h1(i - 8);
        default:
            return h1(i - 4);
        }
    };
    constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

    Rng rng(seed);
    LabeledDataset out;
    Matrix x(kAttributes, instances);
    std::vector<int> labels(static_cast<std::size_t>(instances));
    for (Index j = 0; j < instances; ++j) {
        const int cls = static_cast<int>(rng.below(3));
        const double u = rng.uniform();
        for (Index i = 0; i < kAttributes; ++i) {
            x(i, j) = u * base(kPairs[cls][0], i + 1) + (1.0 - u) * base(kPairs[cls][1], i + 1) +
                      rng.normal();
        }
        labels[static_cast<std::size_t>(j)] = cls;
    }
    out.dataset = Dataset::observed(std::move(x), Mode::RealLimit);
    out.labels = std::move(labels);
    out.class_names = {"0", "1", "2"};
    out.name = "waveform";
    return out;
}

} // namespace snmf
