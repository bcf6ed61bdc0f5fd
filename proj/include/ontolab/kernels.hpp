#pragma once

// Data-parallel inner loops. Each kernel has a plain serial version, kept as
// the reference the tests compare against, and an OpenMP version used by the
// library. Parallel reductions merge partial results in a fixed block order,
// so results do not depend on the thread count.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "ontolab/qcore.hpp"

namespace ontolab {

enum class Exec { serial, parallel };

namespace kernels {

/// Best CHSH grid setting as indices into the direction grid.
struct GridBest {
    double value = -1e300;
    std::size_t a = 0, a2 = 0, b = 0, b2 = 0;
};

namespace serial {

/// sum_k response[k] * weights[k]
double weighted_sum(std::span<const double> response, std::span<const double> weights);

/// Hemisphere indicator: 1 if n.l > tie_tol, 0 if n.l < -tie_tol, else 0.5.
void hemisphere_response(std::span<const BlochVector> lattice, const BlochVector& n, double tie_tol,
                         std::span<double> out);

/// out[k] = max(0, m.l_k) / sum; returns the unnormalized sum.
double clipped_cosine_weights(std::span<const BlochVector> lattice, const BlochVector& m, std::span<double> out);

/// Discrete Wigner values W[q*d + p] = Tr[op A(q,p)] / d with dense A(q,p).
void wigner_values(const CMatrix& op, std::span<double> out);

/// Brute-force CHSH maximum over all quadruples of grid directions.
GridBest chsh_grid(const Eigen::Matrix3d& corr, std::span<const BlochVector> grid);

/// Solves design * X = rhs column by column (least squares).
RMatrix solve_columns(const Eigen::ColPivHouseholderQR<RMatrix>& qr, const RMatrix& rhs);

} // namespace serial

namespace parallel {

double weighted_sum(std::span<const double> response, std::span<const double> weights);
void hemisphere_response(std::span<const BlochVector> lattice, const BlochVector& n, double tie_tol,
                         std::span<double> out);
double clipped_cosine_weights(std::span<const BlochVector> lattice, const BlochVector& m, std::span<double> out);

/// Uses the sparsity of A(q,p): one nonzero per row, O(d) work per point.
void wigner_values(const CMatrix& op, std::span<double> out);

/// Separable evaluation: for fixed (a, a') the CHSH value splits into
/// u.b + v.b' with u = T^T(a + a'), v = T^T(a - a'), so b and b' are
/// maximized independently. Same maximum as the brute-force grid.
GridBest chsh_grid(const Eigen::Matrix3d& corr, std::span<const BlochVector> grid);

RMatrix solve_columns(const Eigen::ColPivHouseholderQR<RMatrix>& qr, const RMatrix& rhs);

} // namespace parallel

// Dispatch helpers.
inline double weighted_sum(Exec e, std::span<const double> r, std::span<const double> w) {
    return e == Exec::serial ? serial::weighted_sum(r, w) : parallel::weighted_sum(r, w);
}

} // namespace kernels
} // namespace ontolab
