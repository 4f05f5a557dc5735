#include "snmf/model.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace snmf;

namespace {

bool has_kind(const std::vector<Violation>& v, const std::string& kind) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

FactorModel fixture(std::uint64_t seed) {
    Rng rng(seed);
    FactorModel m;
    m.atoms = testing::random_atoms(4, 3, rng);
    m.activations = Matrix(3, 7);
    for (Index n = 0; n < m.activations.size(); ++n) {
        m.activations.data()[n] = rng.gamma(2.0, 0.1);
    }
    return m;
}

} // namespace

TEST_CASE("reconstruct") {
    FactorModel m = fixture(1);
    const auto rec = reconstruct(m);
    double direct_sum = 0.0;
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 7; ++j) {
            double l0 = 0.0;
            double l1 = 0.0;
            for (Index k = 0; k < 3; ++k) {
                l0 += m.atoms.theta[0](i, k) * m.activations(k, j);
                l1 += m.atoms.theta[1](i, k) * m.activations(k, j);
            }
            CHECK(std::abs(rec.lambda_bar[0](i, j) - l0) <= 1e-12);
            CHECK(std::abs(rec.lambda_bar[1](i, j) - l1) <= 1e-12);
            CHECK(std::abs(rec.x_hat(i, j) - (l0 - l1)) <= 1e-12);
            direct_sum += l0 + l1;
        }
    }
    CHECK(std::abs(direct_sum - m.activations.sum()) <= 1e-12 * m.activations.sum());

    FactorModel zero = m;
    zero.activations.setZero();
    const auto rz = reconstruct(zero);
    CHECK(rz.x_hat.isZero(0.0));
    CHECK(rz.lambda_bar[0].isZero(0.0));

    FactorModel a = m;
    FactorModel b = fixture(2);
    b.atoms = m.atoms;
    FactorModel sum = m;
    sum.activations = a.activations + b.activations;
    const Matrix lhs = reconstruct(sum).x_hat;
    const Matrix rhs = reconstruct(a).x_hat + reconstruct(b).x_hat;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

    FactorModel bad = m;
    bad.activations = Matrix::Ones(2, 7);
    CHECK_THROWS(reconstruct(bad));
}

TEST_CASE("one-hot atom reproduces its activation row") {
    FactorModel m;
    m.atoms = Atoms(Matrix::Zero(3, 1), Matrix::Zero(3, 1));
    m.atoms.theta[0](0, 0) = 1.0;
    m.activations = Matrix(1, 4);
    m.activations << 1.0, 2.0, 3.0, 4.0;
    const auto rec = reconstruct(m);
    CHECK(rec.x_hat.row(0) == m.activations.row(0));
    CHECK(rec.x_hat.bottomRows(2).isZero(0.0));
}

TEST_CASE("split_atoms") {
    Matrix w(3, 2);
    w << 1.0, -2.0, 2.0, 0.5, 3.0, -1.5;
    const Atoms atoms = split_atoms(w);
    for (Index k = 0; k < 2; ++k) {
        CHECK(std::abs(atoms.theta[0].col(k).sum() + atoms.theta[1].col(k).sum() - 1.0) <= 1e-12);
        const double l1 = w.col(k).cwiseAbs().sum();
        for (Index i = 0; i < 3; ++i) {
            CHECK(std::abs(atoms.dictionary()(i, k) - w(i, k) / l1) <= 1e-15);
            CHECK((atoms.theta[0](i, k) == 0.0 || atoms.theta[1](i, k) == 0.0));
        }
    }
    CHECK(atoms.theta[1].col(0).isZero(0.0));

    FactorModel m;
    m.atoms = atoms;
    m.activations = Matrix::Ones(2, 3);
    CHECK(validate(&m, nullptr, nullptr).empty());

    Matrix dead = Matrix::Zero(2, 1);
    CHECK_THROWS_AS(split_atoms(dead), std::invalid_argument);
}

TEST_CASE("validate reports each broken invariant") {
    FactorModel m = fixture(3);
    HyperParams h = HyperParams::shared(4, 3, 7, 1.0, 2.0, 0.5);
    Dataset d = Dataset::observed(Matrix::Ones(4, 7), Mode::Integer);
    CHECK(validate(&m, &h, &d).empty());

    FactorModel off = m;
    off.atoms.theta[0].col(1) *= 0.9 / (off.atoms.theta[0].col(1).sum() + off.atoms.theta[1].col(1).sum());
    off.atoms.theta[1].col(1) *= 0.0;
    CHECK(has_kind(validate(&off, nullptr, nullptr), "atoms_normalization"));

    HyperParams overlap = h;
    overlap.upsilon_map.setZero();
    CHECK(has_kind(validate(nullptr, &overlap, nullptr), "slot_disjointness"));

    HyperParams range = h;
    range.omega_map(0, 0) = 5;
    CHECK(has_kind(validate(nullptr, &range, nullptr), "slot_range"));

    Dataset frac = d;
    frac.x(1, 1) = 0.5;
    CHECK(has_kind(validate(nullptr, nullptr, &frac), "data_integer"));
    frac.mode = Mode::RealLimit;
    CHECK(validate(nullptr, nullptr, &frac).empty());

    FactorModel neg = m;
    neg.activations(0, 0) = -1.0;
    CHECK(has_kind(validate(&neg, nullptr, nullptr), "activations_nonnegative"));
}

TEST_CASE("per-coordinate hyperparameters") {
    std::array<Matrix, 2> aa{Matrix::Constant(3, 2, 2.0), Matrix::Constant(3, 2, 0.02)};
    Vector ak(2);
    ak << 5.0, 50.0;
    Vector bk = ak / 300.0;
    const HyperParams h = HyperParams::per_coordinate(aa, ak, bk, 10);
    CHECK(validate(nullptr, &h, nullptr).empty());
    CHECK(h.alpha.size() == 2 * 3 * 2 + 2);
    CHECK(h.atom_shape(1, 2, 1) == 0.02);
    CHECK(h.act_shape(1, 9) == 50.0);
    CHECK(h.act_rate(0, 4) == doctest::Approx(5.0 / 300.0));
    CHECK(h.min_shape() == 0.02);
}

TEST_CASE("mask storage") {
    std::vector<std::uint8_t> grid(100, 0);
    grid[3] = grid[50] = grid[99] = 1;
    const Mask sparse = Mask::from_grid(10, 10, grid);
    CHECK_FALSE(sparse.is_dense());
    CHECK(sparse.count() == 3);
    CHECK(sparse.observed(3, 0));
    CHECK(sparse.observed(0, 5));
    CHECK(sparse.observed(9, 9));
    CHECK_FALSE(sparse.observed(4, 0));
    CHECK(sparse.to_grid() == grid);

    std::fill(grid.begin(), grid.end(), 1);
    grid[7] = 0;
    const Mask dense = Mask::from_grid(10, 10, grid);
    CHECK(dense.is_dense());
    CHECK(dense.count() == 99);
    CHECK_FALSE(dense.observed(7, 0));

    const Mask pairs = Mask::from_pairs(2, 2, {{0, 1}, {1, 0}});
    CHECK(pairs.observed(0, 1));
    CHECK_FALSE(pairs.observed(0, 0));
    CHECK_THROWS(Mask::from_pairs(2, 2, {{2, 0}}));

    CHECK(mode_from_string("int") == Mode::Integer);
    CHECK(to_string(Mode::RealLimit) == "real");
    CHECK_THROWS(mode_from_string("complex"));
}
