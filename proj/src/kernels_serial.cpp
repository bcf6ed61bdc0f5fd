#include "ontolab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ontolab::kernels::serial {

double weighted_sum(std::span<const double> response, std::span<const double> weights) {
    if (response.size() != weights.size()) throw std::invalid_argument("weighted_sum: length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < response.size(); ++k) s += response[k] * weights[k];
    return s;
}

void hemisphere_response(std::span<const BlochVector> lattice, const BlochVector& n, double tie_tol,
                         std::span<double> out) {
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        const double c = n.dot(lattice[k]);
        out[k] = c > tie_tol ? 1.0 : (c < -tie_tol ? 0.0 : 0.5);
    }
}

double clipped_cosine_weights(std::span<const BlochVector> lattice, const BlochVector& m, std::span<double> out) {
    double total = 0.0;
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        out[k] = std::max(0.0, m.dot(lattice[k]));
        total += out[k];
    }
    for (auto& w : out) w /= total;
    return total;
}

void wigner_values(const CMatrix& op, std::span<double> out) {
    const auto d = op.rows();
    const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(d));
    for (Eigen::Index q = 0; q < d; ++q) {
        for (Eigen::Index p = 0; p < d; ++p) {
            CMatrix a = CMatrix::Zero(d, d);
            for (Eigen::Index m = 0; m < d; ++m) {
                for (Eigen::Index n = 0; n < d; ++n) {
                    if ((m + n) % d == (2 * q) % d) a(m, n) = std::pow(omega, static_cast<double>(p * (m - n)));
                }
            }
            out[static_cast<std::size_t>(q * d + p)] = (op * a).trace().real() / static_cast<double>(d);
        }
    }
}

GridBest chsh_grid(const Eigen::Matrix3d& corr, std::span<const BlochVector> grid) {
    auto vec = [](const BlochVector& v) { return Eigen::Vector3d(v.x(), v.y(), v.z()); };
    GridBest best;
    const std::size_t g = grid.size();
    for (std::size_t ia = 0; ia < g; ++ia) {
        for (std::size_t ia2 = 0; ia2 < g; ++ia2) {
            for (std::size_t ib = 0; ib < g; ++ib) {
                for (std::size_t ib2 = 0; ib2 < g; ++ib2) {
                    const Eigen::Vector3d a = vec(grid[ia]), a2 = vec(grid[ia2]);
                    const Eigen::Vector3d b = vec(grid[ib]), b2 = vec(grid[ib2]);
                    const double v = a.dot(corr * b) + a.dot(corr * b2) + a2.dot(corr * b) - a2.dot(corr * b2);
                    if (v > best.value) best = {v, ia, ia2, ib, ib2};
                }
            }
        }
    }
    return best;
}

RMatrix solve_columns(const Eigen::ColPivHouseholderQR<RMatrix>& qr, const RMatrix& rhs) {
    RMatrix x(qr.cols(), rhs.cols());
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) x.col(j) = qr.solve(rhs.col(j));
    return x;
}

} // namespace ontolab::kernels::serial
