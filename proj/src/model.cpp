#include "snmf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace snmf {

Atoms Atoms::uniform(Index attributes, Index components) {
    const double v = 1.0 / static_cast<double>(2 * attributes);
    return Atoms(Matrix::Constant(attributes, components, v),
                 Matrix::Constant(attributes, components, v));
}

double HyperParams::min_shape() const {
    double lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 2; ++s) {
        for (Index k = 0; k < phi_map[s].cols(); ++k) {
            for (Index i = 0; i < phi_map[s].rows(); ++i) {
                lo = std::min(lo, atom_shape(s, i, k));
            }
        }
    }
    for (Index j = 0; j < upsilon_map.cols(); ++j) {
        for (Index k = 0; k < upsilon_map.rows(); ++k) {
            lo = std::min(lo, act_shape(k, j));
        }
    }
    return lo;
}

HyperParams HyperParams::shared(Index attributes, Index components, Index instances,
                                double alpha_atoms, double alpha_act, double beta_act) {
    HyperParams h;
    h.alpha = Vector(2);
    h.alpha << alpha_atoms, alpha_act;
    h.beta = Vector::Constant(1, beta_act);
    h.phi_map = {IndexMatrix::Zero(attributes, components), IndexMatrix::Zero(attributes, components)};
    h.upsilon_map = IndexMatrix::Ones(components, instances);
    h.omega_map = IndexMatrix::Zero(components, instances);
    return h;
}

HyperParams HyperParams::per_coordinate(const std::array<Matrix, 2>& alpha_atoms,
                                        const Vector& alpha_act, const Vector& beta_act,
                                        Index instances) {
    const Index I = alpha_atoms[0].rows();
    const Index K = alpha_atoms[0].cols();
    if (alpha_atoms[1].rows() != I || alpha_atoms[1].cols() != K || alpha_act.size() != K ||
        beta_act.size() != K) {
        throw std::invalid_argument("HyperParams::per_coordinate: inconsistent dimensions");
    }
    HyperParams h;
    h.alpha = Vector(2 * I * K + K);
    h.beta = beta_act;
    h.phi_map = {IndexMatrix(I, K), IndexMatrix(I, K)};
    for (Index k = 0; k < K; ++k) {
        for (int s = 0; s < 2; ++s) {
            for (Index i = 0; i < I; ++i) {
                const int slot = per_coordinate_atom_slot(I, s, i, k);
                h.phi_map[s](i, k) = slot;
                h.alpha[slot] = alpha_atoms[s](i, k);
            }
        }
    }
    h.upsilon_map = IndexMatrix(K, instances);
    h.omega_map = IndexMatrix(K, instances);
    for (Index k = 0; k < K; ++k) {
        h.alpha[2 * I * K + k] = alpha_act[k];
        h.upsilon_map.row(k).setConstant(static_cast<int>(2 * I * K + k));
        h.omega_map.row(k).setConstant(static_cast<int>(k));
    }
    return h;
}

std::string to_string(Mode mode) { return mode == Mode::Integer ? "int" : "real"; }

Mode mode_from_string(const std::string& name) {
    if (name == "int" || name == "integer") {
        return Mode::Integer;
    }
    if (name == "real" || name == "real-limit") {
        return Mode::RealLimit;
    }
    throw std::invalid_argument("unknown mode '" + name + "' (expected int or real)");
}

Mask Mask::full(Index rows, Index cols) {
    Mask m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.count_ = rows * cols;
    m.dense_ = true;
    m.grid_.assign(static_cast<std::size_t>(rows * cols), 1);
    return m;
}

Mask Mask::from_grid(Index rows, Index cols, const std::vector<std::uint8_t>& grid) {
    if (static_cast<Index>(grid.size()) != rows * cols) {
        throw std::invalid_argument("Mask::from_grid: grid size mismatch");
    }
    Mask m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.count_ = std::count_if(grid.begin(), grid.end(), [](std::uint8_t v) { return v != 0; });
    m.dense_ = 4 * m.count_ > rows * cols;
    if (m.dense_) {
        m.grid_.resize(grid.size());
        std::transform(grid.begin(), grid.end(), m.grid_.begin(),
                       [](std::uint8_t v) { return v != 0 ? 1 : 0; });
    } else {
        m.sparse_.reserve(static_cast<std::size_t>(m.count_));
        for (std::size_t n = 0; n < grid.size(); ++n) {
            if (grid[n] != 0) {
                m.sparse_.push_back(static_cast<Index>(n));
            }
        }
    }
    return m;
}

Mask Mask::from_pairs(Index rows, Index cols, const std::vector<std::pair<Index, Index>>& pairs) {
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(rows * cols), 0);
    for (const auto& [i, j] : pairs) {
        if (i < 0 || i >= rows || j < 0 || j >= cols) {
            throw std::out_of_range("Mask::from_pairs: cell outside the grid");
        }
        grid[static_cast<std::size_t>(j * rows + i)] = 1;
    }
    return from_grid(rows, cols, grid);
}

bool Mask::observed(Index i, Index j) const {
    const Index n = j * rows_ + i;
    if (dense_) {
        return grid_[static_cast<std::size_t>(n)] != 0;
    }
    return std::binary_search(sparse_.begin(), sparse_.end(), n);
}

std::vector<std::uint8_t> Mask::to_grid() const {
    if (dense_) {
        return grid_;
    }
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(rows_ * cols_), 0);
    for (Index n : sparse_) {
        grid[static_cast<std::size_t>(n)] = 1;
    }
    return grid;
}

Dataset Dataset::observed(Matrix x, Mode mode) {
    Dataset d;
    d.mask = Mask::full(x.rows(), x.cols());
    d.x = std::move(x);
    d.mode = mode;
    return d;
}

Reconstruction reconstruct(const FactorModel& model) {
    if (model.atoms.theta[0].cols() != model.activations.rows() ||
        model.atoms.theta[1].cols() != model.activations.rows() ||
        model.atoms.theta[0].rows() != model.atoms.theta[1].rows()) {
        throw std::invalid_argument("reconstruct: dimension mismatch between atoms and activations");
    }
    Reconstruction r;
    r.lambda_bar[0] = model.atoms.theta[0] * model.activations;
    r.lambda_bar[1] = model.atoms.theta[1] * model.activations;
    r.x_hat = r.lambda_bar[0] - r.lambda_bar[1];
    return r;
}

Atoms split_atoms(const Matrix& w) {
    Atoms atoms(w.cwiseMax(0.0), (-w).cwiseMax(0.0));
    for (Index k = 0; k < w.cols(); ++k) {
        const double norm = w.col(k).cwiseAbs().sum();
        if (!(norm > 0.0)) {
            throw std::invalid_argument("split_atoms: column " + std::to_string(k) +
                                        " is all zero");
        }
        atoms.theta[0].col(k) /= norm;
        atoms.theta[1].col(k) /= norm;
    }
    return atoms;
}

namespace {

void add(std::vector<Violation>& out, std::string kind, std::string message) {
    out.push_back({std::move(kind), std::move(message)});
}

void check_model(const FactorModel& m, std::vector<Violation>& out) {
    const auto& t = m.atoms.theta;
    if (t[0].rows() != t[1].rows() || t[0].cols() != t[1].cols()) {
        add(out, "dimension", "theta_0 and theta_1 differ in shape");
        return;
    }
    if (t[0].cols() != m.activations.rows()) {
        add(out, "dimension", "atoms have K=" + std::to_string(t[0].cols()) +
                                  " but activations have " +
                                  std::to_string(m.activations.rows()) + " rows");
    }
    if (!t[0].allFinite() || !t[1].allFinite() || (t[0].array() < 0.0).any() ||
        (t[1].array() < 0.0).any()) {
        add(out, "atoms_nonnegative", "atoms contain negative or non-finite entries");
    }
    for (Index k = 0; k < t[0].cols(); ++k) {
        const double sum = t[0].col(k).sum() + t[1].col(k).sum();
        if (std::abs(sum - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "atom column " << k << " sums to " << sum;
            add(out, "atoms_normalization", msg.str());
        }
    }
    if (!m.activations.allFinite() || (m.activations.array() < 0.0).any()) {
        add(out, "activations_nonnegative", "activations contain negative or non-finite entries");
    }
}

void check_hyper(const HyperParams& h, std::vector<Violation>& out) {
    const auto n_alpha = static_cast<int>(h.alpha.size());
    const auto n_beta = static_cast<int>(h.beta.size());
    if ((h.alpha.array() <= 0.0).any() || !h.alpha.allFinite()) {
        add(out, "shape_positive", "shape hyperparameters must be positive");
    }
    if ((h.beta.array() < 0.0).any() || !h.beta.allFinite()) {
        add(out, "rate_nonnegative", "rate hyperparameters must be nonnegative");
    }
    if (h.phi_map[0].rows() != h.phi_map[1].rows() || h.phi_map[0].cols() != h.phi_map[1].cols()) {
        add(out, "dimension", "phi_map slices differ in shape");
        return;
    }
    if (h.upsilon_map.rows() != h.omega_map.rows() || h.upsilon_map.cols() != h.omega_map.cols()) {
        add(out, "dimension", "upsilon_map and omega_map differ in shape");
    }
    if (h.upsilon_map.rows() != h.phi_map[0].cols()) {
        add(out, "dimension", "activation maps disagree with atom maps on K");
    }
    std::set<int> phi_image, upsilon_image;
    bool range_ok = true;
    for (const auto& slice : h.phi_map) {
        for (Index n = 0; n < slice.size(); ++n) {
            const int a = slice.data()[n];
            range_ok = range_ok && a >= 0 && a < n_alpha;
            phi_image.insert(a);
        }
    }
    for (Index n = 0; n < h.upsilon_map.size(); ++n) {
        const int a = h.upsilon_map.data()[n];
        range_ok = range_ok && a >= 0 && a < n_alpha;
        upsilon_image.insert(a);
    }
    for (Index n = 0; n < h.omega_map.size(); ++n) {
        const int b = h.omega_map.data()[n];
        range_ok = range_ok && b >= 0 && b < n_beta;
    }
    if (!range_ok) {
        add(out, "slot_range", "a map points outside the hyperparameter arrays");
    }
    for (int a : phi_image) {
        if (upsilon_image.contains(a)) {
            add(out, "slot_disjointness",
                "shape slot " + std::to_string(a) + " is shared by atoms and activations");
        }
    }
}

void check_dataset(const Dataset& d, std::vector<Violation>& out) {
    if (d.mask.rows() != d.x.rows() || d.mask.cols() != d.x.cols()) {
        add(out, "mask_shape", "mask does not match the data grid");
        return;
    }
    for (Index j = 0; j < d.x.cols(); ++j) {
        for (Index i = 0; i < d.x.rows(); ++i) {
            if (!d.mask.observed(i, j)) {
                continue;
            }
            const double v = d.x(i, j);
            if (!std::isfinite(v)) {
                add(out, "data_finite", "observed cell (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") is not finite");
                return;
            }
            if (d.mode == Mode::Integer && v != std::round(v)) {
                add(out, "data_integer", "integer mode but cell (" + std::to_string(i) + "," +
                                             std::to_string(j) + ") is fractional");
                return;
            }
        }
    }
}

} // namespace

std::vector<Violation> validate(const FactorModel* model, const HyperParams* hyper,
                                const Dataset* dataset) {
    std::vector<Violation> out;
    if (model != nullptr) {
        check_model(*model, out);
    }
    if (hyper != nullptr) {
        check_hyper(*hyper, out);
    }
    if (dataset != nullptr) {
        check_dataset(*dataset, out);
    }
    if (model != nullptr && hyper != nullptr && out.empty()) {
        if (hyper->attributes() != model->attributes() ||
            hyper->components() != model->components() ||
            hyper->instances() != model->instances()) {
            add(out, "dimension", "hyperparameter maps do not match the model shape");
        }
    }
    if (model != nullptr && dataset != nullptr && out.empty()) {
        if (dataset->attributes() != model->attributes() ||
            dataset->instances() != model->instances()) {
            add(out, "dimension", "dataset does not match the model shape");
        }
    }
    return out;
}

} // namespace snmf
