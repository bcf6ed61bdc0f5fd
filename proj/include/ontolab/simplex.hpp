#pragma once

#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace ontolab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize c.x  subject to  A x = b,  lower <= x <= upper.
/// Bounds may be infinite.
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd c;

    Eigen::Index variables() const { return A.cols(); }
    Eigen::Index constraints() const { return A.rows(); }

    /// Throws std::invalid_argument on inconsistent sizes or lower > upper.
    void validate() const;

    /// n variables in [0, inf), no constraints, zero objective.
    static LinearProgram nonnegative(Eigen::Index rows, Eigen::Index n);
};

enum class LPStatus { optimal, infeasible, unbounded };

const char* to_string(LPStatus s);

/// Exactly one of `x` (optimal) and `certificate` (infeasible) is non-empty.
struct LPOutcome {
    LPStatus status = LPStatus::infeasible;
    Eigen::VectorXd x;
    Eigen::VectorXd certificate;
    double objective = 0.0;
    double residual = 0.0; // ||A x - b||_inf when optimal
    long pivots = 0;
};

struct SimplexOptions {
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-10;
    long max_pivots = 200000;
};

class IllConditionedError : public std::runtime_error {
public:
    explicit IllConditionedError(const std::string& detail) : std::runtime_error("ill-conditioned: " + detail) {}
};

/// Two-phase dense tableau simplex with Bland's rule. Bounds are folded into
/// a standard form (shifts, reflections, splits and explicit upper-bound
/// rows). Infeasible verdicts carry the phase-one dual vector restricted to
/// the equality rows, scaled to unit max-norm; it always passes
/// verify_certificate. Final solutions are recomputed from a fresh LU of the
/// basis; throws IllConditionedError when even that misses the 1e-8 residual.
LPOutcome simplex_solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Farkas check for {A x = b, lower <= x <= upper}: with g = A^T y, every
/// component with g_j > tol needs a finite upper bound, g_j < -tol a finite
/// lower bound, and y.b - sum_j max over [l_j, u_j] of g_j x_j > tol.
/// No such x can exist when this holds.
bool verify_certificate(const LinearProgram& lp, const Eigen::VectorXd& y, double tol = 1e-9);

/// y.b minus the support of A^T y over the bound box; -inf when A^T y points
/// at an infinite bound.
double certificate_gap(const LinearProgram& lp, const Eigen::VectorXd& y, double tol = 1e-9);

} // namespace ontolab
