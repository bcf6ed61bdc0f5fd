#include <algorithm>
#include <cmath>

#include "ontolab/onto.hpp"

namespace ontolab {

RankDeficientError::RankDeficientError(std::size_t rank, std::size_t needed)
    : std::invalid_argument("effect set is not informationally complete: Gram rank " + std::to_string(rank) +
                            " < " + std::to_string(needed)),
      rank_(rank) {}

std::vector<PureState> ic_effect_set(std::size_t dim) {
    std::vector<PureState> out;
    for (std::size_t i = 0; i < dim; ++i) out.push_back(basis_state(dim, i));
    const auto d = static_cast<Eigen::Index>(dim);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            CVector re = CVector::Zero(d), im = CVector::Zero(d);
            re(i) = im(i) = 1.0;
            re(j) = 1.0;
            im(j) = Complex(0.0, 1.0);
            out.emplace_back(std::move(re));
            out.emplace_back(std::move(im));
        }
    }
    return out;
}

// Parameter layout for a Hermitian B: B_ii for each i, then (Re B_ij, Im B_ij)
// for i < j. Tr[B P] = sum_i B_ii P_ii + sum_{i<j} 2 (Re B_ij Re P_ij + Im B_ij Im P_ij).
HermitianDesign::HermitianDesign(const std::vector<Projector>& effects, std::size_t dim) : dim_(dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    const auto e = static_cast<Eigen::Index>(effects.size());
    for (const auto& p : effects) require_same_dim(p.dim(), dim, "HermitianDesign");

    RMatrix gram(e, e);
    for (Eigen::Index a = 0; a < e; ++a) {
        for (Eigen::Index b = a; b < e; ++b) {
            const double g = (effects[a].matrix() * effects[b].matrix()).trace().real();
            gram(a, b) = gram(b, a) = g;
        }
    }
    const std::size_t needed = dim * dim;
    if (e > 0) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(gram, Eigen::EigenvaluesOnly);
        rank_ = static_cast<std::size_t>((es.eigenvalues().array() > 1e-8).count());
    }
    if (rank_ < needed) throw RankDeficientError(rank_, needed);

    design_.resize(e, d * d);
    for (Eigen::Index row = 0; row < e; ++row) {
        const CMatrix& p = effects[row].matrix();
        Eigen::Index col = 0;
        for (Eigen::Index i = 0; i < d; ++i) design_(row, col++) = p(i, i).real();
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = i + 1; j < d; ++j) {
                design_(row, col++) = 2.0 * p(i, j).real();
                design_(row, col++) = 2.0 * p(i, j).imag();
            }
        }
    }
    qr_.compute(design_);
}

RMatrix HermitianDesign::solve(const RMatrix& responses, Exec exec) const {
    if (responses.rows() != design_.rows()) throw std::invalid_argument("HermitianDesign: response rows != effect count");
    return exec == Exec::serial ? kernels::serial::solve_columns(qr_, responses)
                                : kernels::parallel::solve_columns(qr_, responses);
}

Eigen::VectorXd HermitianDesign::residuals(const RMatrix& params, const RMatrix& responses) const {
    return (design_ * params - responses).cwiseAbs().colwise().maxCoeff().transpose();
}

CMatrix HermitianDesign::to_matrix(const Eigen::Ref<const Eigen::VectorXd>& params) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    CMatrix b = CMatrix::Zero(d, d);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < d; ++i) b(i, i) = params(col++);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            b(i, j) = Complex(params(col), params(col + 1));
            b(j, i) = std::conj(b(i, j));
            col += 2;
        }
    }
    return b;
}

ReconstructedOperator reconstruct_ontic_operator(const std::vector<Projector>& effects,
                                                 std::span<const double> responses, std::size_t dim) {
    if (responses.size() != effects.size()) throw std::invalid_argument("reconstruct: one response per effect required");
    const HermitianDesign design(effects, dim);
    RMatrix rhs = Eigen::Map<const Eigen::VectorXd>(responses.data(), static_cast<Eigen::Index>(responses.size()));
    const RMatrix params = design.solve(rhs, Exec::serial);
    const double residual = design.residuals(params, rhs)(0);
    return {HermitianOperator(design.to_matrix(params.col(0))), residual, residual > kReconstructionConsistencyTol};
}

double TheoremReport::max_lambda_deviation() const {
    double m = 0.0;
    for (const auto& p : proportionality) m = std::max(m, std::abs(p.lambda - 1.0));
    return m;
}

double TheoremReport::max_proportionality_deviation() const {
    double m = 0.0;
    for (const auto& p : proportionality) m = std::max(m, p.deviation);
    return m;
}

double TheoremReport::max_lambda_mean_residual() const {
    double m = 0.0;
    for (double r : lambda_mean_residual) m = std::max(m, r);
    return m;
}

bool TheoremReport::structure_holds() const {
    return born_residual < tol && reconstruction_residual < tol && max_lambda_deviation() < tol &&
           max_proportionality_deviation() < tol && max_lambda_mean_residual() < tol &&
           born_response_residual < tol && supports_disjoint && operator_bound_violation <= 1e-9;
}

namespace {

double hermitian_norm(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

TheoremReport theorem_structure_check(const OntoModel& model, const std::vector<PureState>& prepared,
                                      const std::vector<PureState>& ic_effects, double tol,
                                      const TheoremOptions& options) {
    const std::size_t d = model.dim();
    const std::size_t k_size = model.size();
    const auto s_count = static_cast<Eigen::Index>(prepared.size());
    const auto e_count = static_cast<Eigen::Index>(ic_effects.size());
    const auto k_count = static_cast<Eigen::Index>(k_size);
    if (prepared.empty()) throw std::invalid_argument("theorem_structure_check: no prepared states");
    for (const auto& s : prepared) require_same_dim(s.dim(), d, "theorem_structure_check");

    std::vector<Projector> projectors;
    for (const auto& phi : ic_effects) projectors.emplace_back(phi);
    const HermitianDesign design(projectors, d);

    RMatrix responses(e_count, k_count);
    for (Eigen::Index e = 0; e < e_count; ++e) {
        const auto r = model.response(ic_effects[static_cast<std::size_t>(e)]);
        responses.row(e) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), k_count);
    }
    RMatrix weights(k_count, s_count);
    for (Eigen::Index i = 0; i < s_count; ++i) {
        const auto w = model.weights(prepared[static_cast<std::size_t>(i)]);
        weights.col(i) = Eigen::Map<const Eigen::VectorXd>(w.data(), k_count);
    }
    RMatrix born(e_count, s_count);
    for (Eigen::Index e = 0; e < e_count; ++e) {
        for (Eigen::Index i = 0; i < s_count; ++i) {
            born(e, i) = born_probability(prepared[static_cast<std::size_t>(i)], ic_effects[static_cast<std::size_t>(e)]);
        }
    }

    const RMatrix params = design.solve(responses, options.exec);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        if (!params.col(k).allFinite()) {
            throw std::runtime_error("operator reconstruction failed at ontic point '" +
                                     model.ontic().labels()[static_cast<std::size_t>(k)] + "'");
        }
    }

    TheoremReport rep;
    rep.tol = tol;
    rep.ontic_size = k_size;
    rep.born_residual = (responses * weights - born).cwiseAbs().maxCoeff();

    // Ray classes among the prepared states: distinct[i] is the first index
    // of the class state i belongs to.
    std::vector<std::size_t> ray_class(prepared.size());
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        ray_class[i] = i;
        for (std::size_t j = 0; j < i; ++j) {
            if (same_ray(prepared[i], prepared[j])) {
                ray_class[i] = ray_class[j];
                break;
            }
        }
        if (ray_class[i] == i) ++rep.distinct_prepared;
    }

    std::vector<CMatrix> proj_psi;
    for (const auto& psi : prepared) proj_psi.push_back(Projector(psi).matrix());

    for (Eigen::Index i = 0; i < s_count; ++i) {
        const Eigen::VectorXd mixed = params * weights.col(i);
        rep.reconstruction_residual = std::max(
            rep.reconstruction_residual, hermitian_norm(design.to_matrix(mixed) - proj_psi[static_cast<std::size_t>(i)]));
    }

    rep.lambda_mean_residual.assign(prepared.size(), 0.0);
    std::vector<double> lambda_mean(prepared.size(), 0.0);
    rep.support_map.assign(k_size, std::nullopt);
    std::vector<std::size_t> supporters;
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const CMatrix b = design.to_matrix(params.col(k));
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<CMatrix>(b, Eigen::EigenvaluesOnly).eigenvalues();
        rep.operator_bound_violation = std::max({rep.operator_bound_violation, -ev.minCoeff(), ev.maxCoeff() - 1.0});

        supporters.clear();
        for (Eigen::Index i = 0; i < s_count; ++i) {
            if (weights(k, i) > options.support_threshold) supporters.push_back(static_cast<std::size_t>(i));
        }
        const auto point = static_cast<std::size_t>(k);
        for (std::size_t i : supporters) {
            const PureState& psi = prepared[i];
            const double lambda = psi.amplitudes().dot(b * psi.amplitudes()).real();
            rep.proportionality.push_back({point, i, lambda, hermitian_norm(b - lambda * proj_psi[i])});
            lambda_mean[i] += lambda * weights(k, static_cast<Eigen::Index>(i));
            const double dev = (responses.col(k) - born.col(static_cast<Eigen::Index>(i))).cwiseAbs().maxCoeff();
            rep.born_response_residual = std::max(rep.born_response_residual, dev);
        }
        bool single_class = !supporters.empty();
        for (std::size_t a = 0; a < supporters.size(); ++a) {
            for (std::size_t c = a + 1; c < supporters.size(); ++c) {
                if (ray_class[supporters[a]] != ray_class[supporters[c]]) {
                    rep.overlaps.push_back({point, supporters[a], supporters[c]});
                    single_class = false;
                }
            }
        }
        if (single_class) rep.support_map[point] = ray_class[supporters.front()];
    }
    for (std::size_t i = 0; i < prepared.size(); ++i) rep.lambda_mean_residual[i] = std::abs(lambda_mean[i] - 1.0);
    rep.supports_disjoint = rep.overlaps.empty();
    return rep;
}

} // namespace ontolab
