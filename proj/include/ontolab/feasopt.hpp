#pragma once

#include <cstdint>
#include <vector>

#include "ontolab/kernels.hpp"
#include "ontolab/qcore.hpp"
#include "ontolab/simplex.hpp"

namespace ontolab {

/// T_{ji} = |<phi_j|psi_i>|^2, effects along rows.
RMatrix target_matrix(const std::vector<PureState>& states, const std::vector<PureState>& effects);

/// Born-rule reproduction with K ontic points: find rho (K x S, columns are
/// distributions) and P (E x K, entries in [0,1]) with P rho = T.
struct FeasibilityProblem {
    std::size_t dim = 0;
    std::vector<PureState> states;
    std::vector<PureState> effects;
    std::size_t ontic_size = 0;
    RMatrix targets;

    FeasibilityProblem(std::vector<PureState> states, std::vector<PureState> effects, std::size_t ontic_size);

    std::size_t state_count() const { return states.size(); }
    std::size_t effect_count() const { return effects.size(); }
};

/// max |P rho - T|
double reproduction_residual(const FeasibilityProblem& problem, const RMatrix& weights, const RMatrix& responses);

/// An LP over one block with the other frozen, its verdict, and the block
/// (rho column K x 1, or P as E x K) when feasible.
struct BlockSolve {
    LinearProgram program;
    LPOutcome outcome;
    RMatrix block;

    bool feasible() const { return outcome.status == LPStatus::optimal; }
};

/// rho >= 0, sum rho = 1, P rho = T(:, i) for fixed responses P (E x K).
BlockSolve solve_rho(const FeasibilityProblem& problem, const RMatrix& responses, std::size_t state_index);

/// P in [0,1]^{E x K} with P rho = T for fixed weights rho (K x S).
/// Variables are P in row-major order.
BlockSolve solve_responses(const FeasibilityProblem& problem, const RMatrix& weights);

/// With one ontic point every rho column is forced to (1), so the response
/// LP decides the joint problem exactly.
BlockSolve solve_single_point(const FeasibilityProblem& problem);

/// Instance generated from a hidden valid model: each ontic point carries
/// one of S Haar-random states, every state owns at least one point, rho
/// spreads each state's mass over its points with flat Dirichlet weights
/// and P(phi|k) is the Born probability of the point's state.
struct ForwardInstance {
    FeasibilityProblem problem;
    RMatrix weights;   // K x S
    RMatrix responses; // E x K
};

ForwardInstance forward_instance(std::size_t dim, std::size_t states, std::size_t effects, std::size_t ontic_size,
                                 std::uint64_t seed);

struct AlternationReport {
    std::size_t restarts = 0;
    std::vector<std::size_t> iterations;         // per restart
    std::vector<std::vector<double>> traces;     // per restart; entry 0 is the initial residual
    std::vector<double> restart_best;            // final residual per restart
    double best_residual = 0.0;
    std::size_t best_restart = 0;
    std::size_t lp_failures = 0; // block LPs skipped as ill-conditioned
    RMatrix best_weights;   // K x S
    RMatrix best_responses; // E x K
};

struct AlternationOptions {
    std::size_t restarts = 20;
    std::size_t max_iters = 200;
    std::uint64_t seed = 1;
    double stall_tol = 1e-10; // stop a restart when an iteration gains less
    Exec exec = Exec::parallel;
};

/// Alternating minimax search for (rho, P). Each half-step solves, per
/// column of rho (resp. per row of P), the LP  min t  s.t. |P rho - T| <= t
/// with rho a distribution and P in [0,1]; the per-column split minimizes
/// the same max-norm objective as the joint block LP. Restart 0 uses the delta
/// initialization when K >= S; the others draw rho columns from a flat
/// Dirichlet and P uniformly from [0,1]. Restarts run concurrently and the
/// best is chosen by lowest residual, ties by restart index.
AlternationReport alternate_search(const FeasibilityProblem& problem, const AlternationOptions& options);

inline AlternationReport alternate_search(const FeasibilityProblem& problem, std::size_t restarts,
                                          std::size_t max_iters, std::uint64_t seed) {
    AlternationOptions o;
    o.restarts = restarts;
    o.max_iters = max_iters;
    o.seed = seed;
    return alternate_search(problem, o);
}

/// Computational basis followed by bases-1 of the quadratic-phase bases
/// (1/sqrt d) sum_m w^(a m^2 + j m) |m>, a = 0, 1, ...; mutually unbiased
/// for odd prime d. dim 3 with 3 bases gives the 9-state MUB set.
std::vector<PureState> mub_states(std::size_t dim, std::size_t bases = 3);

} // namespace ontolab
