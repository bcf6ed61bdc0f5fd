#include "ontolab/feasopt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ontolab {

RMatrix target_matrix(const std::vector<PureState>& states, const std::vector<PureState>& effects) {
    RMatrix t(static_cast<Eigen::Index>(effects.size()), static_cast<Eigen::Index>(states.size()));
    for (std::size_t j = 0; j < effects.size(); ++j) {
        for (std::size_t i = 0; i < states.size(); ++i) {
            t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = born_probability(states[i], effects[j]);
        }
    }
    return t;
}

FeasibilityProblem::FeasibilityProblem(std::vector<PureState> s, std::vector<PureState> e, std::size_t k)
    : states(std::move(s)), effects(std::move(e)), ontic_size(k) {
    if (states.empty() || effects.empty()) throw std::invalid_argument("feasibility problem needs states and effects");
    if (ontic_size == 0) throw std::invalid_argument("feasibility problem needs ontic_size >= 1");
    dim = states.front().dim();
    targets = target_matrix(states, effects);
}

double reproduction_residual(const FeasibilityProblem& problem, const RMatrix& weights, const RMatrix& responses) {
    return (responses * weights - problem.targets).cwiseAbs().maxCoeff();
}

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void check_block_sizes(const FeasibilityProblem& p, const RMatrix* responses, const RMatrix* weights) {
    const auto k = idx(p.ontic_size);
    if (responses && (responses->rows() != idx(p.effect_count()) || responses->cols() != k)) {
        throw std::invalid_argument("responses must be effects x ontic_size");
    }
    if (weights && (weights->rows() != k || weights->cols() != idx(p.state_count()))) {
        throw std::invalid_argument("weights must be ontic_size x states");
    }
}

} // namespace

BlockSolve solve_rho(const FeasibilityProblem& problem, const RMatrix& responses, std::size_t state_index) {
    check_block_sizes(problem, &responses, nullptr);
    if (state_index >= problem.state_count()) throw std::out_of_range("solve_rho: state index out of range");
    if (responses.minCoeff() < 0.0 || responses.maxCoeff() > 1.0) {
        throw std::invalid_argument("solve_rho: responses must lie in [0,1]");
    }
    const auto k = idx(problem.ontic_size);
    const auto e = idx(problem.effect_count());
    BlockSolve out;
    out.program = LinearProgram::nonnegative(e + 1, k);
    out.program.A.topRows(e) = responses;
    out.program.A.row(e).setOnes();
    out.program.b.head(e) = problem.targets.col(idx(state_index));
    out.program.b(e) = 1.0;
    out.outcome = simplex_solve(out.program);
    if (out.feasible()) out.block = out.outcome.x;
    return out;
}

BlockSolve solve_responses(const FeasibilityProblem& problem, const RMatrix& weights) {
    check_block_sizes(problem, nullptr, &weights);
    const auto k = idx(problem.ontic_size);
    const auto e = idx(problem.effect_count());
    const auto s = idx(problem.state_count());
    BlockSolve out;
    out.program = LinearProgram::nonnegative(e * s, e * k);
    out.program.upper.setOnes();
    // Row (j, i): sum_k P_{jk} rho_{ki} = T_{ji}; variable P_{jk} at j*K + k.
    for (Eigen::Index j = 0; j < e; ++j) {
        for (Eigen::Index i = 0; i < s; ++i) {
            out.program.A.block(j * s + i, j * k, 1, k) = weights.col(i).transpose();
            out.program.b(j * s + i) = problem.targets(j, i);
        }
    }
    out.outcome = simplex_solve(out.program);
    if (out.feasible()) {
        out.block = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            out.outcome.x.data(), e, k);
    }
    return out;
}

BlockSolve solve_single_point(const FeasibilityProblem& problem) {
    if (problem.ontic_size != 1) throw std::invalid_argument("solve_single_point: ontic_size must be 1");
    return solve_responses(problem, RMatrix::Ones(1, idx(problem.state_count())));
}

ForwardInstance forward_instance(std::size_t dim, std::size_t states, std::size_t effects, std::size_t ontic_size,
                                 std::uint64_t seed) {
    if (states == 0 || ontic_size < states) throw std::invalid_argument("forward_instance: need 1 <= states <= ontic_size");
    auto rng = seeded_engine(seed);
    std::vector<PureState> prepared, measured;
    for (std::size_t i = 0; i < states; ++i) prepared.push_back(random_pure_state(dim, rng));
    for (std::size_t j = 0; j < effects; ++j) measured.push_back(random_pure_state(dim, rng));

    // owner[k]: state carried by ontic point k; the first S points cover
    // every state, the rest are assigned at random, then shuffled.
    std::vector<std::size_t> owner(ontic_size);
    std::uniform_int_distribution<std::size_t> pick(0, states - 1);
    for (std::size_t k = 0; k < ontic_size; ++k) owner[k] = k < states ? k : pick(rng);
    std::shuffle(owner.begin(), owner.end(), rng);

    ForwardInstance inst{FeasibilityProblem(prepared, measured, ontic_size), RMatrix::Zero(idx(ontic_size), idx(states)),
                         RMatrix(idx(effects), idx(ontic_size))};
    std::exponential_distribution<double> expo(1.0);
    for (std::size_t k = 0; k < ontic_size; ++k) inst.weights(idx(k), idx(owner[k])) = expo(rng);
    for (Eigen::Index i = 0; i < idx(states); ++i) inst.weights.col(i) /= inst.weights.col(i).sum();
    for (std::size_t j = 0; j < effects; ++j) {
        for (std::size_t k = 0; k < ontic_size; ++k) {
            inst.responses(idx(j), idx(k)) = born_probability(prepared[owner[k]], measured[j]);
        }
    }
    return inst;
}

namespace {

// min t s.t. |P rho_i - T_i| <= t, rho_i a distribution. Variables
// [rho (K), t, s+ (E), s- (E)].
Eigen::VectorXd minimax_rho_column(const RMatrix& responses, const Eigen::VectorXd& target) {
    const auto e = responses.rows(), k = responses.cols();
    LinearProgram lp = LinearProgram::nonnegative(1 + 2 * e, k + 1 + 2 * e);
    lp.A.row(0).head(k).setOnes();
    lp.b(0) = 1.0;
    lp.A.block(1, 0, e, k) = responses;
    lp.A.block(1 + e, 0, e, k) = -responses;
    lp.A.block(1, k, 2 * e, 1).setConstant(-1.0);
    lp.A.block(1, k + 1, 2 * e, 2 * e).setIdentity();
    lp.b.segment(1, e) = target;
    lp.b.segment(1 + e, e) = -target;
    lp.c(k) = 1.0;
    const LPOutcome o = simplex_solve(lp);
    if (o.status != LPStatus::optimal) throw std::runtime_error("alternation: rho step LP not optimal");
    return o.x.head(k).cwiseMax(0.0) / o.x.head(k).cwiseMax(0.0).sum();
}

// min t s.t. |P_j rho - T_j| <= t, P_j in [0,1]^K. Variables
// [P_j (K), t, s+ (S), s- (S)].
Eigen::RowVectorXd minimax_response_row(const RMatrix& weights, const Eigen::RowVectorXd& target) {
    const auto k = weights.rows(), s = weights.cols();
    LinearProgram lp = LinearProgram::nonnegative(2 * s, k + 1 + 2 * s);
    lp.upper.head(k).setOnes();
    lp.A.block(0, 0, s, k) = weights.transpose();
    lp.A.block(s, 0, s, k) = -weights.transpose();
    lp.A.block(0, k, 2 * s, 1).setConstant(-1.0);
    lp.A.block(0, k + 1, 2 * s, 2 * s).setIdentity();
    lp.b.head(s) = target.transpose();
    lp.b.tail(s) = -target.transpose();
    lp.c(k) = 1.0;
    const LPOutcome o = simplex_solve(lp);
    if (o.status != LPStatus::optimal) throw std::runtime_error("alternation: response step LP not optimal");
    return o.x.head(k).cwiseMax(0.0).cwiseMin(1.0).transpose();
}

struct RestartResult {
    std::vector<double> trace;
    RMatrix weights, responses;
    std::size_t lp_failures = 0;
};

RestartResult run_restart(const FeasibilityProblem& problem, std::size_t restart, const AlternationOptions& opt) {
    const auto k = idx(problem.ontic_size);
    const auto e = idx(problem.effect_count());
    const auto s = idx(problem.state_count());
    const RMatrix& target = problem.targets;
    RestartResult r;
    r.weights = RMatrix::Zero(k, s);
    r.responses = RMatrix::Zero(e, k);

    if (restart == 0 && k >= s) {
        for (Eigen::Index i = 0; i < s; ++i) r.weights(i, i) = 1.0;
        r.responses.leftCols(s) = target;
        for (Eigen::Index c = s; c < k; ++c) r.responses.col(c) = target.col(0);
    } else {
        auto rng = seeded_engine(opt.seed, restart);
        std::exponential_distribution<double> expo(1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (Eigen::Index i = 0; i < s; ++i) {
            for (Eigen::Index c = 0; c < k; ++c) r.weights(c, i) = expo(rng);
            r.weights.col(i) /= r.weights.col(i).sum();
        }
        for (Eigen::Index j = 0; j < e; ++j) {
            for (Eigen::Index c = 0; c < k; ++c) r.responses(j, c) = unif(rng);
        }
    }

    auto column_error = [&](Eigen::Index i, const RMatrix& w, const RMatrix& p) {
        return (p * w.col(i) - target.col(i)).cwiseAbs().maxCoeff();
    };
    auto row_error = [&](Eigen::Index j, const RMatrix& w, const RMatrix& p) {
        return (p.row(j) * w - target.row(j)).cwiseAbs().maxCoeff();
    };

    double current = reproduction_residual(problem, r.weights, r.responses);
    r.trace.push_back(current);
    for (std::size_t it = 0; it < opt.max_iters && current > 1e-12; ++it) {
        // Blocks only change where the LP strictly improves the local error,
        // so the max-norm residual can never increase.
        // A block whose LP is numerically unusable keeps its previous value.
        for (Eigen::Index i = 0; i < s; ++i) {
            RMatrix candidate = r.weights;
            try {
                candidate.col(i) = minimax_rho_column(r.responses, target.col(i));
            } catch (const IllConditionedError&) {
                ++r.lp_failures;
                continue;
            }
            if (column_error(i, candidate, r.responses) < column_error(i, r.weights, r.responses)) {
                r.weights.col(i) = candidate.col(i);
            }
        }
        for (Eigen::Index j = 0; j < e; ++j) {
            RMatrix candidate = r.responses;
            try {
                candidate.row(j) = minimax_response_row(r.weights, target.row(j));
            } catch (const IllConditionedError&) {
                ++r.lp_failures;
                continue;
            }
            if (row_error(j, r.weights, candidate) < row_error(j, r.weights, r.responses)) {
                r.responses.row(j) = candidate.row(j);
            }
        }
        const double next = reproduction_residual(problem, r.weights, r.responses);
        r.trace.push_back(next);
        const bool stalled = current - next < opt.stall_tol;
        current = next;
        if (stalled) break;
    }
    return r;
}

} // namespace

AlternationReport alternate_search(const FeasibilityProblem& problem, const AlternationOptions& options) {
    if (options.restarts < 1) throw std::invalid_argument("alternate_search: restarts must be >= 1");
    std::vector<RestartResult> results(options.restarts);
    if (options.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(options.restarts); ++r) {
            results[static_cast<std::size_t>(r)] = run_restart(problem, static_cast<std::size_t>(r), options);
        }
    } else {
        for (std::size_t r = 0; r < options.restarts; ++r) results[r] = run_restart(problem, r, options);
    }

    AlternationReport rep;
    rep.restarts = options.restarts;
    for (std::size_t r = 0; r < results.size(); ++r) {
        const double last = results[r].trace.back();
        rep.traces.push_back(results[r].trace);
        rep.iterations.push_back(results[r].trace.size() - 1);
        rep.restart_best.push_back(last);
        rep.lp_failures += results[r].lp_failures;
        if (r == 0 || last < rep.best_residual) {
            rep.best_residual = last;
            rep.best_restart = r;
        }
    }
    rep.best_weights = results[rep.best_restart].weights;
    rep.best_responses = results[rep.best_restart].responses;
    return rep;
}

std::vector<PureState> mub_states(std::size_t dim, std::size_t bases) {
    if (bases < 1 || bases > dim + 1) throw std::invalid_argument("mub_states: 1 <= bases <= dim + 1");
    std::vector<PureState> out;
    for (std::size_t m = 0; m < dim; ++m) out.push_back(basis_state(dim, m));
    const double w = 2.0 * std::numbers::pi / static_cast<double>(dim);
    for (std::size_t a = 0; a + 1 < bases; ++a) {
        for (std::size_t j = 0; j < dim; ++j) {
            CVector v(idx(dim));
            for (std::size_t m = 0; m < dim; ++m) {
                const std::size_t phase = (a * m * m + j * m) % dim;
                v(idx(m)) = std::polar(1.0, w * static_cast<double>(phase));
            }
            out.emplace_back(std::move(v));
        }
    }
    return out;
}

} // namespace ontolab
