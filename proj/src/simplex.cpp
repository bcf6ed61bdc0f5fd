#include "ontolab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace ontolab {

void LinearProgram::validate() const {
    const auto n = A.cols();
    if (b.size() != A.rows()) throw std::invalid_argument("LinearProgram: b has wrong length");
    if (lower.size() != n || upper.size() != n || c.size() != n) {
        throw std::invalid_argument("LinearProgram: bounds/objective have wrong length");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) || lower(j) == kInf ||
            upper(j) == -kInf) {
            throw std::invalid_argument("LinearProgram: invalid bounds for variable " + std::to_string(j));
        }
    }
    if (!A.allFinite() || !b.allFinite() || !c.allFinite()) {
        throw std::invalid_argument("LinearProgram: non-finite coefficients");
    }
}

LinearProgram LinearProgram::nonnegative(Eigen::Index rows, Eigen::Index n) {
    LinearProgram lp;
    lp.A = Eigen::MatrixXd::Zero(rows, n);
    lp.b = Eigen::VectorXd::Zero(rows);
    lp.lower = Eigen::VectorXd::Zero(n);
    lp.upper = Eigen::VectorXd::Constant(n, kInf);
    lp.c = Eigen::VectorXd::Zero(n);
    return lp;
}

const char* to_string(LPStatus s) {
    switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    }
    return "?";
}

double certificate_gap(const LinearProgram& lp, const Eigen::VectorXd& y, double tol) {
    if (y.size() != lp.constraints()) return -kInf;
    const Eigen::VectorXd g = lp.A.transpose() * y;
    double support = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        if (g(j) > tol) {
            if (!std::isfinite(lp.upper(j))) return -kInf;
            support += g(j) * lp.upper(j);
        } else if (g(j) < -tol) {
            if (!std::isfinite(lp.lower(j))) return -kInf;
            support += g(j) * lp.lower(j);
        } else {
            // Negligible component: charge it against the worse finite bound.
            const double bound = g(j) > 0 ? lp.upper(j) : lp.lower(j);
            if (std::isfinite(bound)) support += g(j) * bound;
        }
    }
    return y.dot(lp.b) - support;
}

bool verify_certificate(const LinearProgram& lp, const Eigen::VectorXd& y, double tol) {
    return certificate_gap(lp, y, tol) > tol;
}

namespace {

// Standard form  A_s y = b_s, y >= 0. Column kinds per original variable.
enum class Fold { shift, reflect, split };

struct StandardForm {
    Eigen::MatrixXd A;      // rows: equality rows then upper-bound rows
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    std::vector<Fold> fold; // per original variable
    std::vector<Eigen::Index> first_col;
    Eigen::VectorXd offset; // x = offset + sign * y (split: y+ - y-)
    Eigen::Index eq_rows = 0;
};

StandardForm to_standard(const LinearProgram& lp) {
    StandardForm sf;
    const auto m = lp.constraints();
    const auto n = lp.variables();
    sf.eq_rows = m;
    sf.fold.resize(static_cast<std::size_t>(n));
    sf.first_col.resize(static_cast<std::size_t>(n));
    sf.offset = Eigen::VectorXd::Zero(n);

    Eigen::Index cols = 0, bound_rows = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const bool lf = std::isfinite(lp.lower(j)), uf = std::isfinite(lp.upper(j));
        auto& f = sf.fold[static_cast<std::size_t>(j)];
        sf.first_col[static_cast<std::size_t>(j)] = cols;
        if (lf) {
            f = Fold::shift;
            sf.offset(j) = lp.lower(j);
            cols += 1;
            if (uf) {
                cols += 1; // slack of the upper-bound row
                bound_rows += 1;
            }
        } else if (uf) {
            f = Fold::reflect;
            sf.offset(j) = lp.upper(j);
            cols += 1;
        } else {
            f = Fold::split;
            cols += 2;
        }
    }

    sf.A = Eigen::MatrixXd::Zero(m + bound_rows, cols);
    sf.b = Eigen::VectorXd::Zero(m + bound_rows);
    sf.c = Eigen::VectorXd::Zero(cols);
    sf.b.head(m) = lp.b - lp.A * sf.offset;

    Eigen::Index brow = m;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index col = sf.first_col[static_cast<std::size_t>(j)];
        switch (sf.fold[static_cast<std::size_t>(j)]) {
        case Fold::shift:
            sf.A.col(col).head(m) = lp.A.col(j);
            sf.c(col) = lp.c(j);
            if (std::isfinite(lp.upper(j))) {
                sf.A(brow, col) = 1.0;
                sf.A(brow, col + 1) = 1.0;
                sf.b(brow) = lp.upper(j) - lp.lower(j);
                ++brow;
            }
            break;
        case Fold::reflect:
            sf.A.col(col).head(m) = -lp.A.col(j);
            sf.c(col) = -lp.c(j);
            break;
        case Fold::split:
            sf.A.col(col).head(m) = lp.A.col(j);
            sf.A.col(col + 1).head(m) = -lp.A.col(j);
            sf.c(col) = lp.c(j);
            sf.c(col + 1) = -lp.c(j);
            break;
        }
    }
    return sf;
}

Eigen::VectorXd from_standard(const StandardForm& sf, const Eigen::VectorXd& y) {
    Eigen::VectorXd x = sf.offset;
    for (std::size_t j = 0; j < sf.fold.size(); ++j) {
        const Eigen::Index col = sf.first_col[j];
        const auto jj = static_cast<Eigen::Index>(j);
        switch (sf.fold[j]) {
        case Fold::shift: x(jj) += y(col); break;
        case Fold::reflect: x(jj) -= y(col); break;
        case Fold::split: x(jj) += y(col) - y(col + 1); break;
        }
    }
    return x;
}

// Dense tableau over [structural | artificial] columns with the objective in
// the last row and right-hand sides in the last column.
class Tableau {
public:
    Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SimplexOptions& opt)
        : m_(a.rows()), ns_(a.cols()), opt_(opt) {
        orig_ = Eigen::MatrixXd::Zero(m_, ns_ + m_ + 1);
        orig_.leftCols(ns_) = a;
        orig_.block(0, ns_, m_, m_).setIdentity();
        orig_.col(ns_ + m_) = b;
        t_ = Eigen::MatrixXd::Zero(m_ + 1, ns_ + m_ + 1);
        t_.topRows(m_) = orig_;
        basis_.resize(static_cast<std::size_t>(m_));
        for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = ns_ + i;
        active_.assign(static_cast<std::size_t>(m_), true);
    }

    Eigen::Index rhs_col() const { return ns_ + m_; }
    bool is_artificial(Eigen::Index col) const { return col >= ns_; }

    void set_costs(const Eigen::VectorXd& cost) {
        cost_ = cost;
        // Reduced costs r = c - c_B B^{-1} A, objective cell holds -c_B x_B.
        t_.row(m_).setZero();
        t_.row(m_).head(cost.size()) = cost.transpose();
        for (Eigen::Index i = 0; i < m_; ++i) {
            const Eigen::Index bc = basis_[static_cast<std::size_t>(i)];
            if (bc < cost.size() && cost(bc) != 0.0) t_.row(m_) -= cost(bc) * t_.row(i);
        }
    }

    double objective() const { return -t_(m_, rhs_col()); }

    /// Rebuilds the tableau as B^{-1} [A I b] from the original data,
    /// discarding rounding accumulated by the pivots.
    void refactor() {
        Eigen::MatrixXd bm(m_, m_);
        for (Eigen::Index i = 0; i < m_; ++i) bm.col(i) = orig_.col(basis_[static_cast<std::size_t>(i)]);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
        t_.topRows(m_) = lu.solve(orig_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (!active_[static_cast<std::size_t>(i)]) t_.row(i).setZero();
            // Basic values pushed slightly negative by rounding.
            if (t_(i, rhs_col()) < 0.0 && t_(i, rhs_col()) > -opt_.feasibility_tol) t_(i, rhs_col()) = 0.0;
        }
        set_costs(cost_);
    }

    /// Runs Bland's rule until optimal. Returns false when unbounded.
    bool run(bool allow_artificial_entering, long& pivots) {
        long since_refactor = kRefactorInterval;
        for (;;) {
            if (since_refactor >= kRefactorInterval) {
                refactor();
                since_refactor = 0;
            }
            Eigen::Index enter = -1;
            const Eigen::Index last = allow_artificial_entering ? ns_ + m_ : ns_;
            for (Eigen::Index j = 0; j < last; ++j) {
                if (t_(m_, j) < -opt_.optimality_tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) {
                if (since_refactor == 0) return true;
                // Confirm optimality on a freshly factorized tableau.
                since_refactor = kRefactorInterval;
                continue;
            }

            // Harris two-pass ratio test: bound the step with slightly
            // relaxed ratios, then take the largest pivot within it (ties to
            // the smallest basic index).
            const double relax = 1e-9;
            double theta = kInf;
            for (Eigen::Index i = 0; i < m_; ++i) {
                if (!active_[static_cast<std::size_t>(i)] || t_(i, enter) <= opt_.pivot_tol) continue;
                theta = std::min(theta, (std::max(t_(i, rhs_col()), 0.0) + relax) / t_(i, enter));
            }
            Eigen::Index leave = -1;
            for (Eigen::Index i = 0; i < m_; ++i) {
                if (!active_[static_cast<std::size_t>(i)] || t_(i, enter) <= opt_.pivot_tol) continue;
                if (std::max(t_(i, rhs_col()), 0.0) / t_(i, enter) > theta) continue;
                if (leave < 0 || t_(i, enter) > t_(leave, enter) * (1.0 + 1e-9) ||
                    (t_(i, enter) >= t_(leave, enter) * (1.0 - 1e-9) &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    leave = i;
                }
            }
            if (leave < 0) {
                if (since_refactor == 0) return false;
                since_refactor = kRefactorInterval;
                continue;
            }
            pivot(leave, enter);
            ++since_refactor;
            if (++pivots > opt_.max_pivots) throw std::runtime_error("simplex: pivot limit exceeded");
        }
    }

    void pivot(Eigen::Index r, Eigen::Index s) {
        const Eigen::RowVectorXd row = t_.row(r) / t_(r, s);
        const Eigen::VectorXd col = t_.col(s);
        t_.noalias() -= col * row;
        t_.row(r) = row;
        // Clean the pivot column exactly.
        t_.col(s).setZero();
        t_(r, s) = 1.0;
        basis_[static_cast<std::size_t>(r)] = s;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (t_(i, rhs_col()) < 0.0 && t_(i, rhs_col()) > -opt_.feasibility_tol) t_(i, rhs_col()) = 0.0;
        }
    }

    /// Moves zero-level artificials out of the basis; rows where that is
    /// impossible are redundant and deactivated.
    void expel_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
            Eigen::Index best = -1;
            for (Eigen::Index j = 0; j < ns_; ++j) {
                if (std::abs(t_(i, j)) > opt_.pivot_tol && (best < 0 || std::abs(t_(i, j)) > std::abs(t_(i, best)))) {
                    best = j;
                }
            }
            if (best >= 0) {
                pivot(i, best);
            } else {
                active_[static_cast<std::size_t>(i)] = false;
            }
        }
    }

    const std::vector<Eigen::Index>& basis() const { return basis_; }

private:
    static constexpr long kRefactorInterval = 25;

    Eigen::Index m_, ns_;
    SimplexOptions opt_;
    Eigen::MatrixXd orig_;
    Eigen::VectorXd cost_;
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
    std::vector<bool> active_;
};

Eigen::MatrixXd basis_matrix(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& basis) {
    const auto m = a.rows();
    Eigen::MatrixXd bm(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index col = basis[static_cast<std::size_t>(i)];
        if (col < a.cols()) {
            bm.col(i) = a.col(col);
        } else {
            bm.col(i) = Eigen::VectorXd::Unit(m, col - a.cols());
        }
    }
    return bm;
}

} // namespace

LPOutcome simplex_solve(const LinearProgram& lp, const SimplexOptions& options) {
    lp.validate();
    StandardForm sf = to_standard(lp);
    const auto m = sf.A.rows();
    const auto ns = sf.A.cols();

    // Nonnegative right-hand side.
    Eigen::VectorXd row_sign = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (sf.b(i) < 0) {
            row_sign(i) = -1.0;
            sf.A.row(i) *= -1.0;
            sf.b(i) *= -1.0;
        }
    }

    LPOutcome out;
    if (m == 0) {
        // Only sign constraints: y = 0 is feasible; any negative cost is unbounded.
        if ((sf.c.array() < -options.optimality_tol).any()) {
            out.status = LPStatus::unbounded;
            return out;
        }
        out.status = LPStatus::optimal;
        out.x = from_standard(sf, Eigen::VectorXd::Zero(ns));
        out.objective = lp.c.dot(out.x);
        return out;
    }

    Tableau tab(sf.A, sf.b, options);
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ns + m);
    phase1.tail(m).setOnes();
    tab.set_costs(phase1);
    tab.run(false, out.pivots);

    if (tab.objective() > options.feasibility_tol) {
        // Phase-one duals: B^T y = c_B. They satisfy y^T A_s <= 0 and
        // y^T b_s = phase-one optimum > 0.
        const Eigen::MatrixXd bm = basis_matrix(sf.A, tab.basis());
        Eigen::VectorXd cb(m);
        for (Eigen::Index i = 0; i < m; ++i) cb(i) = phase1(tab.basis()[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd ys = bm.transpose().fullPivLu().solve(cb);
        Eigen::VectorXd y = ys.head(sf.eq_rows).cwiseProduct(row_sign.head(sf.eq_rows));
        const double scale = y.cwiseAbs().maxCoeff();
        if (scale > 0) y /= scale;
        if (!verify_certificate(lp, y)) {
            throw IllConditionedError("phase-one dual does not verify as a Farkas certificate");
        }
        out.status = LPStatus::infeasible;
        out.certificate = std::move(y);
        return out;
    }

    tab.expel_artificials();
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(ns + m);
    phase2.head(ns) = sf.c;
    tab.set_costs(phase2);
    if (!tab.run(false, out.pivots)) {
        out.status = LPStatus::unbounded;
        return out;
    }

    // Refactorize: x_B = B^{-1} b from the original columns.
    const Eigen::MatrixXd bm = basis_matrix(sf.A, tab.basis());
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(bm);
    Eigen::VectorXd xb = lu.solve(sf.b);
    xb += lu.solve(sf.b - bm * xb); // one step of iterative refinement
    Eigen::VectorXd ystd = Eigen::VectorXd::Zero(ns + m);
    for (Eigen::Index i = 0; i < m; ++i) ystd(tab.basis()[static_cast<std::size_t>(i)]) = xb(i);
    const double most_negative = ystd.size() ? ystd.minCoeff() : 0.0;
    // Rounding-level negatives are clamped; the residual check below decides.
    if (most_negative < -1e-6 || ystd.tail(m).cwiseAbs().maxCoeff() > 1e-6) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", most_negative);
        throw IllConditionedError(std::string("refactorized basis is infeasible (min ") + buf + ")");
    }
    ystd = ystd.cwiseMax(0.0);

    out.x = from_standard(sf, ystd.head(ns));
    out.residual = lp.constraints() ? (lp.A * out.x - lp.b).cwiseAbs().maxCoeff() : 0.0;
    const double bound_violation =
        std::max((lp.lower - out.x).maxCoeff(), (out.x - lp.upper).maxCoeff());
    if (out.residual >= options.feasibility_tol || bound_violation > options.feasibility_tol) {
        throw IllConditionedError("solution residual " + std::to_string(out.residual));
    }
    out.status = LPStatus::optimal;
    out.objective = lp.c.dot(out.x);
    return out;
}

} // namespace ontolab
