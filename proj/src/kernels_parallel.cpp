#include "ontolab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <omp.h>

namespace ontolab::kernels::parallel {

namespace {

constexpr std::size_t kBlock = 4096;

// Partial sums over fixed-size blocks, merged in block order.
template <class F>
double blocked_sum(std::size_t n, F&& term) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        double s = 0.0;
        for (std::size_t k = lo; k < hi; ++k) s += term(k);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

} // namespace

double weighted_sum(std::span<const double> response, std::span<const double> weights) {
    if (response.size() != weights.size()) throw std::invalid_argument("weighted_sum: length mismatch");
    return blocked_sum(response.size(), [&](std::size_t k) { return response[k] * weights[k]; });
}

void hemisphere_response(std::span<const BlochVector> lattice, const BlochVector& n, double tie_tol,
                         std::span<double> out) {
    const auto size = static_cast<std::ptrdiff_t>(lattice.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < size; ++k) {
        const double c = n.dot(lattice[static_cast<std::size_t>(k)]);
        out[static_cast<std::size_t>(k)] = c > tie_tol ? 1.0 : (c < -tie_tol ? 0.0 : 0.5);
    }
}

double clipped_cosine_weights(std::span<const BlochVector> lattice, const BlochVector& m, std::span<double> out) {
    const auto size = static_cast<std::ptrdiff_t>(lattice.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < size; ++k) {
        out[static_cast<std::size_t>(k)] = std::max(0.0, m.dot(lattice[static_cast<std::size_t>(k)]));
    }
    const double total = blocked_sum(out.size(), [&](std::size_t k) { return out[k]; });
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < size; ++k) out[static_cast<std::size_t>(k)] /= total;
    return total;
}

void wigner_values(const CMatrix& op, std::span<double> out) {
    const auto d = static_cast<std::ptrdiff_t>(op.rows());
    const double two_pi_over_d = 2.0 * std::numbers::pi / static_cast<double>(d);
#pragma omp parallel for collapse(2) schedule(static)
    for (std::ptrdiff_t q = 0; q < d; ++q) {
        for (std::ptrdiff_t p = 0; p < d; ++p) {
            // A(q,p)_{mn} is nonzero only at n = 2q - m (mod d).
            Complex s = 0.0;
            for (std::ptrdiff_t m = 0; m < d; ++m) {
                const std::ptrdiff_t n = ((2 * q - m) % d + d) % d;
                const std::ptrdiff_t phase = ((p * (m - n)) % d + d) % d;
                s += op(n, m) * std::polar(1.0, two_pi_over_d * static_cast<double>(phase));
            }
            out[static_cast<std::size_t>(q * d + p)] = s.real() / static_cast<double>(d);
        }
    }
}

GridBest chsh_grid(const Eigen::Matrix3d& corr, std::span<const BlochVector> grid) {
    const std::size_t g = grid.size();
    Eigen::Matrix3Xd dirs(3, static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < g; ++i) dirs.col(static_cast<Eigen::Index>(i)) << grid[i].x(), grid[i].y(), grid[i].z();
    const Eigen::Matrix3Xd ta = corr.transpose() * dirs; // column i: T^T a_i

    // One candidate per a-index, reduced in index order afterwards.
    std::vector<GridBest> per_a(g);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ia = 0; ia < static_cast<std::ptrdiff_t>(g); ++ia) {
        GridBest local;
        Eigen::RowVectorXd ub(static_cast<Eigen::Index>(g)), vb(static_cast<Eigen::Index>(g));
        for (std::size_t ia2 = 0; ia2 < g; ++ia2) {
            const Eigen::Vector3d u = ta.col(ia) + ta.col(static_cast<Eigen::Index>(ia2));
            const Eigen::Vector3d v = ta.col(ia) - ta.col(static_cast<Eigen::Index>(ia2));
            ub.noalias() = u.transpose() * dirs;
            vb.noalias() = v.transpose() * dirs;
            Eigen::Index ib = 0, ib2 = 0;
            const double bu = ub.maxCoeff(&ib);
            const double bv = vb.maxCoeff(&ib2);
            if (bu + bv > local.value) {
                local = {bu + bv, static_cast<std::size_t>(ia), ia2, static_cast<std::size_t>(ib),
                         static_cast<std::size_t>(ib2)};
            }
        }
        per_a[static_cast<std::size_t>(ia)] = local;
    }
    GridBest best;
    for (const auto& c : per_a) {
        if (c.value > best.value) best = c;
    }
    return best;
}

RMatrix solve_columns(const Eigen::ColPivHouseholderQR<RMatrix>& qr, const RMatrix& rhs) {
    RMatrix x(qr.cols(), rhs.cols());
    const auto cols = static_cast<std::ptrdiff_t>(rhs.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < cols; ++j) x.col(j) = qr.solve(rhs.col(j));
    return x;
}

} // namespace ontolab::kernels::parallel
