#include "ontolab/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ontolab {

namespace {

CVector normalized(CVector v, double& norm_out) {
    if (v.size() < 2) {
        throw std::invalid_argument("pure state needs dim >= 2, got " + std::to_string(v.size()));
    }
    norm_out = v.norm();
    if (!std::isfinite(norm_out) || norm_out < kMinNorm) {
        throw std::invalid_argument("degenerate state vector (norm " + std::to_string(norm_out) + ")");
    }
    v /= norm_out;
    return v;
}

CVector from_list(std::initializer_list<Complex> amplitudes) {
    CVector v(static_cast<Eigen::Index>(amplitudes.size()));
    Eigen::Index i = 0;
    for (const auto& a : amplitudes) v(i++) = a;
    return v;
}

} // namespace

PureState::PureState(CVector amplitudes) {
    double norm = 1.0;
    amplitudes_ = normalized(std::move(amplitudes), norm);
    input_norm_ = norm;
}

PureState::PureState(std::initializer_list<Complex> amplitudes) : PureState(from_list(amplitudes)) {}

HermitianOperator::HermitianOperator(CMatrix matrix, double tol) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw std::invalid_argument("Hermitian operator must be a non-empty square matrix");
    }
    const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (!(asym <= tol)) {
        throw std::invalid_argument("matrix is not Hermitian (max |A - A^H| = " + std::to_string(asym) + ")");
    }
    // Snap to exact Hermiticity so eigen-solvers see a clean input.
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
}

Eigen::VectorXd HermitianOperator::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double HermitianOperator::operator_norm() const {
    return eigenvalues().cwiseAbs().maxCoeff();
}

double HermitianOperator::trace() const { return matrix_.trace().real(); }

Projector::Projector(const PureState& phi)
    : matrix_(phi.amplitudes() * phi.amplitudes().adjoint()), source_(phi) {}

double BlochVector::norm() const { return std::sqrt(dot(*this)); }

BlochVector BlochVector::from_angles(double theta, double phi) {
    return BlochVector{{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)}};
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

Complex inner(const PureState& a, const PureState& b) {
    require_same_dim(a.dim(), b.dim(), "inner product");
    return a.amplitudes().dot(b.amplitudes()); // conjugates the left argument
}

double born_probability(const PureState& psi, const PureState& phi) {
    return std::norm(inner(psi, phi));
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

PureState random_pure_state(std::size_t dim, std::mt19937_64& rng) {
    if (dim < 2) throw std::invalid_argument("random_pure_state: dim must be >= 2");
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = Complex(re, im);
    }
    return PureState(std::move(v));
}

PureState random_pure_state(std::size_t dim, std::uint64_t seed) {
    auto rng = seeded_engine(seed);
    return random_pure_state(dim, rng);
}

HermitianOperator pauli_observable(const BlochVector& n) {
    if (std::abs(n.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("pauli_observable: direction must be a unit vector");
    }
    const Complex i(0.0, 1.0);
    CMatrix m(2, 2);
    m << n.z(), n.x() - i * n.y(), n.x() + i * n.y(), -n.z();
    return HermitianOperator(std::move(m));
}

PureState tensor_product(const PureState& a, const PureState& b) {
    const auto da = static_cast<Eigen::Index>(a.dim());
    const auto db = static_cast<Eigen::Index>(b.dim());
    CVector v(da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        v.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
    }
    return PureState(std::move(v));
}

PureState basis_state(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::out_of_range("basis_state: index out of range");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
}

PureState qubit_state(const BlochVector& m) {
    if (std::abs(m.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("qubit_state: Bloch vector must be a unit vector");
    }
    const double theta = std::acos(std::clamp(m.z(), -1.0, 1.0));
    const double phi = std::atan2(m.y(), m.x());
    return PureState({Complex(std::cos(theta / 2), 0.0), std::polar(std::sin(theta / 2), phi)});
}

BlochVector bloch_vector(const PureState& qubit) {
    if (qubit.dim() != 2) throw std::invalid_argument("bloch_vector: qubit state required");
    const Complex a = qubit[0];
    const Complex b = qubit[1];
    const Complex c = std::conj(a) * b;
    return BlochVector{{2.0 * c.real(), 2.0 * c.imag(), std::norm(a) - std::norm(b)}};
}

double expectation(const HermitianOperator& op, const PureState& psi) {
    require_same_dim(op.dim(), psi.dim(), "expectation");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes()).real();
}

bool same_ray(const PureState& a, const PureState& b, double tol) {
    if (a.dim() != b.dim()) return false;
    return std::abs(inner(a, b)) >= 1.0 - tol;
}

} // namespace ontolab
