#pragma once

#include <vector>

#include "ontolab/kernels.hpp"
#include "ontolab/qcore.hpp"

namespace ontolab {

/// Phase-point operators A(q,p) on the d x d lattice, d an odd prime:
/// <m|A(q,p)|n> = [m + n = 2q mod d] w^{p(m-n)}, w = exp(2 pi i / d).
class PhasePointSet {
public:
    explicit PhasePointSet(std::size_t dim);

    std::size_t dim() const { return dim_; }
    const CMatrix& at(std::size_t q, std::size_t p) const { return ops_[q * dim_ + p]; }

private:
    std::size_t dim_;
    std::vector<CMatrix> ops_;
};

inline PhasePointSet phase_point_operators(std::size_t dim) { return PhasePointSet(dim); }

bool is_odd_prime(std::size_t n);

/// d x d quasi-probability grid, W(q, p) at row q, column p.
struct WignerTable {
    std::size_t dim = 0;
    Eigen::MatrixXd values;

    double sum() const { return values.sum(); }
    double min() const { return values.minCoeff(); }
    /// Row sums over p (computational-basis marginal).
    Eigen::VectorXd position_marginal() const { return values.rowwise().sum(); }
    /// Column sums over q (Fourier-basis marginal).
    Eigen::VectorXd momentum_marginal() const { return values.colwise().sum().transpose(); }
};

/// W(q,p) = Tr[op A(q,p)] / d for a unit-trace Hermitian operator.
WignerTable wigner(const HermitianOperator& op, const PhasePointSet& pps, Exec exec = Exec::parallel);
WignerTable wigner(const PureState& psi, const PhasePointSet& pps, Exec exec = Exec::parallel);

/// Sum of -W over entries below -1e-12.
double negativity(const WignerTable& table);

/// sum_{q,p} W(q,p) A(q,p)
HermitianOperator reconstruct_from_wigner(const WignerTable& table, const PhasePointSet& pps);

/// (1/sqrt d) sum_m w^{p m} |m>; the basis whose Born probabilities equal
/// the column sums of the table.
PureState fourier_state(std::size_t dim, std::size_t p);

} // namespace ontolab
