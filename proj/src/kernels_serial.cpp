#include "snmf/kernels.hpp"

namespace snmf::kernels::serial {

ExpectedCounts expected_counts(const std::array<Matrix, 2>& atoms, const Matrix& act,
                               const Dataset& data) {
    const Index I = data.x.rows();
    const Index K = act.rows();
    const Index J = data.x.cols();

    std::array<Matrix, 2> lb{Matrix::Zero(I, J), Matrix::Zero(I, J)};
    for (int s = 0; s < 2; ++s) {
        for (Index i = 0; i < I; ++i) {
            for (Index j = 0; j < J; ++j) {
                double sum = 0.0;
                for (Index k = 0; k < K; ++k) {
                    sum += atoms[s](i, k) * act(k, j);
                }
                lb[s](i, j) = sum;
            }
        }
    }

    std::array<Matrix, 2> u{Matrix::Ones(I, J), Matrix::Ones(I, J)};
    for (Index i = 0; i < I; ++i) {
        for (Index j = 0; j < J; ++j) {
            if (!data.mask.observed(i, j)) {
                continue;
            }
            const auto m = cell_multipliers(data.x(i, j), lb[0](i, j), lb[1](i, j), data.mode);
            u[0](i, j) = m[0];
            u[1](i, j) = m[1];
        }
    }

    ExpectedCounts out;
    out.act = Matrix::Zero(K, J);
    out.atoms = {Matrix::Zero(I, K), Matrix::Zero(I, K)};
    for (int s = 0; s < 2; ++s) {
        for (Index i = 0; i < I; ++i) {
            for (Index k = 0; k < K; ++k) {
                for (Index j = 0; j < J; ++j) {
                    const double z = atoms[s](i, k) * act(k, j) * u[s](i, j);
                    out.act(k, j) += z;
                    out.atoms[s](i, k) += z;
                }
            }
        }
    }
    return out;
}

double data_fit(const std::array<Matrix, 2>& atoms, const Matrix& act, const Dataset& data) {
    double total = 0.0;
    for (Index j = 0; j < data.x.cols(); ++j) {
        for (Index i = 0; i < data.x.rows(); ++i) {
            if (!data.mask.observed(i, j)) {
                continue;
            }
            double lb0 = 0.0;
            double lb1 = 0.0;
            for (Index k = 0; k < act.rows(); ++k) {
                lb0 += atoms[0](i, k) * act(k, j);
                lb1 += atoms[1](i, k) * act(k, j);
            }
            total += cell_fit(data.x(i, j), lb0, lb1, data.mode);
        }
    }
    return total;
}

} // namespace snmf::kernels::serial
