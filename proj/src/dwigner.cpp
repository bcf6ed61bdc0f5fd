#include "ontolab/dwigner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ontolab {

bool is_odd_prime(std::size_t n) {
    if (n < 3 || n % 2 == 0) return false;
    for (std::size_t f = 3; f * f <= n; f += 2) {
        if (n % f == 0) return false;
    }
    return true;
}

PhasePointSet::PhasePointSet(std::size_t dim) : dim_(dim) {
    if (!is_odd_prime(dim)) throw std::invalid_argument("phase-point operators: odd prime required, got " + std::to_string(dim));
    const auto d = static_cast<Eigen::Index>(dim);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(dim);
    ops_.reserve(dim * dim);
    for (Eigen::Index q = 0; q < d; ++q) {
        for (Eigen::Index p = 0; p < d; ++p) {
            CMatrix a = CMatrix::Zero(d, d);
            for (Eigen::Index m = 0; m < d; ++m) {
                const Eigen::Index n = ((2 * q - m) % d + d) % d;
                const Eigen::Index phase = ((p * (m - n)) % d + d) % d;
                a(m, n) = std::polar(1.0, w * static_cast<double>(phase));
            }
            ops_.push_back(std::move(a));
        }
    }
}

WignerTable wigner(const HermitianOperator& op, const PhasePointSet& pps, Exec exec) {
    require_same_dim(op.dim(), pps.dim(), "wigner");
    if (std::abs(op.trace() - 1.0) > 1e-10) {
        throw std::invalid_argument("wigner: operator trace must be 1, got " + std::to_string(op.trace()));
    }
    const auto d = static_cast<Eigen::Index>(pps.dim());
    WignerTable t{pps.dim(), Eigen::MatrixXd(d, d)};
    // values is column-major; fill a row-major buffer indexed q*d + p.
    std::vector<double> buf(static_cast<std::size_t>(d * d));
    if (exec == Exec::serial) {
        kernels::serial::wigner_values(op.matrix(), buf);
    } else {
        kernels::parallel::wigner_values(op.matrix(), buf);
    }
    for (Eigen::Index q = 0; q < d; ++q) {
        for (Eigen::Index p = 0; p < d; ++p) t.values(q, p) = buf[static_cast<std::size_t>(q * d + p)];
    }
    return t;
}

WignerTable wigner(const PureState& psi, const PhasePointSet& pps, Exec exec) {
    return wigner(HermitianOperator(Projector(psi).matrix()), pps, exec);
}

double negativity(const WignerTable& table) {
    double n = 0.0;
    for (Eigen::Index i = 0; i < table.values.size(); ++i) {
        const double w = table.values.data()[i];
        if (w < -1e-12) n -= w;
    }
    return n;
}

HermitianOperator reconstruct_from_wigner(const WignerTable& table, const PhasePointSet& pps) {
    require_same_dim(table.dim, pps.dim(), "reconstruct_from_wigner");
    const auto d = static_cast<Eigen::Index>(pps.dim());
    CMatrix rho = CMatrix::Zero(d, d);
    for (std::size_t q = 0; q < pps.dim(); ++q) {
        for (std::size_t p = 0; p < pps.dim(); ++p) {
            rho += table.values(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) * pps.at(q, p);
        }
    }
    return HermitianOperator(std::move(rho), 1e-10);
}

PureState fourier_state(std::size_t dim, std::size_t p) {
    const auto d = static_cast<Eigen::Index>(dim);
    CVector v(d);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(dim);
    for (Eigen::Index m = 0; m < d; ++m) {
        v(m) = std::polar(1.0, w * static_cast<double>((static_cast<std::size_t>(m) * p) % dim));
    }
    return PureState(std::move(v));
}

} // namespace ontolab
