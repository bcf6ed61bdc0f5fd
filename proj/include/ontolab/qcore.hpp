#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ontolab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

// Inputs with a smaller norm are rejected as degenerate.
inline constexpr double kMinNorm = 1e-9;

/// A normalized vector in C^d, d >= 2. Normalization happens on construction,
/// so every PureState has unit norm to machine precision.
class PureState {
public:
    explicit PureState(CVector amplitudes);
    PureState(std::initializer_list<Complex> amplitudes);

    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
    const CVector& amplitudes() const { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

    /// Norm of the vector handed to the constructor, before normalization.
    double input_norm() const { return input_norm_; }

private:
    CVector amplitudes_;
    double input_norm_ = 1.0;
};

class HermitianOperator {
public:
    explicit HermitianOperator(CMatrix matrix, double tol = 1e-12);

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const CMatrix& matrix() const { return matrix_; }

    /// Ascending real eigenvalues.
    Eigen::VectorXd eigenvalues() const;
    /// Largest absolute eigenvalue.
    double operator_norm() const;
    double trace() const;

private:
    CMatrix matrix_;
};

/// Rank-1 projector |phi><phi|.
class Projector {
public:
    explicit Projector(const PureState& phi);

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const CMatrix& matrix() const { return matrix_; }
    const std::optional<PureState>& source() const { return source_; }

private:
    CMatrix matrix_;
    std::optional<PureState> source_;
};

/// Real 3-vector used for qubit states and spin directions.
struct BlochVector {
    std::array<double, 3> c{0.0, 0.0, 1.0};

    double x() const { return c[0]; }
    double y() const { return c[1]; }
    double z() const { return c[2]; }
    double norm() const;
    double dot(const BlochVector& o) const { return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2]; }

    /// Unit vector from polar angle theta and azimuth phi.
    static BlochVector from_angles(double theta, double phi);
};

Complex inner(const PureState& a, const PureState& b);

/// |<psi|phi>|^2. Throws std::invalid_argument on dimension mismatch.
double born_probability(const PureState& psi, const PureState& phi);

/// Haar-random pure state: complex standard-normal entries from a
/// std::mt19937_64 seeded with `seed`, then normalized.
PureState random_pure_state(std::size_t dim, std::uint64_t seed);
PureState random_pure_state(std::size_t dim, std::mt19937_64& rng);

/// Engine for one (seed, stream) pair. Every stochastic routine in the
/// library draws from engines built here so results depend only on the seed.
std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream = 0);

/// n_x sigma_x + n_y sigma_y + n_z sigma_z. Rejects |n| != 1 (tol 1e-12).
HermitianOperator pauli_observable(const BlochVector& n);

/// Kronecker product; index i*d_b + j holds a_i * b_j.
PureState tensor_product(const PureState& a, const PureState& b);

PureState basis_state(std::size_t dim, std::size_t index);

/// Qubit state whose Bloch vector is `m` (must be unit).
PureState qubit_state(const BlochVector& m);
BlochVector bloch_vector(const PureState& qubit);

/// <psi|A|psi> (real part; A is Hermitian).
double expectation(const HermitianOperator& op, const PureState& psi);

/// True when the states agree up to a global phase: |<a|b>| >= 1 - tol.
bool same_ray(const PureState& a, const PureState& b, double tol = 1e-12);

// Throws std::invalid_argument naming `what` when the dims differ.
void require_same_dim(std::size_t a, std::size_t b, const char* what);

} // namespace ontolab
