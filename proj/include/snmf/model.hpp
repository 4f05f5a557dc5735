#pragma once

// Core data model of Skellam-SNMF.
//
// X (I x J, attributes x instances) is approximated by W lambda where the real
// dictionary W = theta_0 - theta_1 is split into two nonnegative atom tensors
// normalized jointly per component: sum_{s,i} theta_{si|k} = 1. The
// activations lambda (K x J) carry the physical unit of the data.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace snmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// theta[s](i, k) = theta_{si|k}.
struct Atoms {
    std::array<Matrix, 2> theta;

    Atoms() = default;
    Atoms(Matrix theta0, Matrix theta1) : theta{std::move(theta0), std::move(theta1)} {}

    Index attributes() const { return theta[0].rows(); }
    Index components() const { return theta[0].cols(); }
    /// W = theta_0 - theta_1.
    Matrix dictionary() const { return theta[0] - theta[1]; }
    /// Uniform atoms 1/(2I).
    static Atoms uniform(Index attributes, Index components);
};

/// lambda(k, j), nonnegative.
using Activations = Matrix;

struct FactorModel {
    Atoms atoms;
    Activations activations;

    Index attributes() const { return atoms.attributes(); }
    Index components() const { return atoms.components(); }
    Index instances() const { return activations.cols(); }
};

/// Shape/rate hyperparameter slots and the maps that assign them.
///
/// phi_map[s](i, k) and upsilon_map(k, j) index into alpha; omega_map(k, j)
/// indexes into beta. Atom and activation shapes never share a slot.
struct HyperParams {
    Vector alpha;
    Vector beta;
    std::array<IndexMatrix, 2> phi_map;
    IndexMatrix upsilon_map;
    IndexMatrix omega_map;

    Index attributes() const { return phi_map[0].rows(); }
    Index components() const { return phi_map[0].cols(); }
    Index instances() const { return upsilon_map.cols(); }

    double atom_shape(int s, Index i, Index k) const { return alpha[phi_map[s](i, k)]; }
    double act_shape(Index k, Index j) const { return alpha[upsilon_map(k, j)]; }
    double act_rate(Index k, Index j) const { return beta[omega_map(k, j)]; }
    /// Smallest shape over all slots in use.
    double min_shape() const;

    /// One shape slot for every atom coordinate, one shape slot for every
    /// activation and one shared rate slot.
    static HyperParams shared(Index attributes, Index components, Index instances,
                              double alpha_atoms, double alpha_act, double beta_act);

    /// A slot per atom coordinate (s, i, k) and, for activations, a shape and
    /// rate slot per component k. alpha_atoms[s](i, k); alpha_act and beta_act
    /// have length K. Atom slots come first (k-major, then s, then i), then the
    /// K activation shapes.
    static HyperParams per_coordinate(const std::array<Matrix, 2>& alpha_atoms,
                                      const Vector& alpha_act, const Vector& beta_act,
                                      Index instances);

    static int per_coordinate_atom_slot(Index attributes, int s, Index i, Index k) {
        return static_cast<int>(k * 2 * attributes + s * attributes + i);
    }
};

enum class Mode { Integer, RealLimit };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// Set of observed cells. Stored densely when more than a quarter of the grid
/// is observed, as a sorted list of linear indices otherwise.
class Mask {
  public:
    Mask() = default;
    static Mask full(Index rows, Index cols);
    static Mask from_grid(Index rows, Index cols, const std::vector<std::uint8_t>& grid);
    static Mask from_pairs(Index rows, Index cols, const std::vector<std::pair<Index, Index>>& pairs);

    bool observed(Index i, Index j) const;
    Index count() const { return count_; }
    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    bool is_full() const { return count_ == rows_ * cols_; }
    bool is_dense() const { return dense_; }
    /// Column-major 0/1 grid.
    std::vector<std::uint8_t> to_grid() const;

  private:
    Index rows_ = 0;
    Index cols_ = 0;
    Index count_ = 0;
    bool dense_ = true;
    std::vector<std::uint8_t> grid_;
    std::vector<Index> sparse_;
};

struct Dataset {
    Matrix x;
    Mask mask;
    Mode mode = Mode::RealLimit;

    Index attributes() const { return x.rows(); }
    Index instances() const { return x.cols(); }
    /// Full observation mask.
    static Dataset observed(Matrix x, Mode mode);
};

/// lambda-bar_s = theta_s lambda and x-hat = lambda-bar_0 - lambda-bar_1.
struct Reconstruction {
    std::array<Matrix, 2> lambda_bar;
    Matrix x_hat;
};

Reconstruction reconstruct(const FactorModel& model);

/// theta_{si|k} proportional to (|W_ik| + (-1)^s W_ik) / 2, normalized per k.
Atoms split_atoms(const Matrix& w);

struct Violation {
    std::string kind;
    std::string message;
};

/// Checks every invariant of the three objects; an empty list means valid.
/// Pass nullptr to skip an object.
std::vector<Violation> validate(const FactorModel* model, const HyperParams* hyper,
                                const Dataset* dataset);

} // namespace snmf
