#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontolab/kernels.hpp"
#include "ontolab/qcore.hpp"

namespace ontolab {

/// Finite ordered set of ontic points with unique labels. Points may carry a
/// quantum state (delta model) or a sphere direction (qubit lattice models).
class OnticSpace {
public:
    explicit OnticSpace(std::vector<std::string> labels, std::vector<PureState> point_states = {},
                        std::vector<BlochVector> directions = {});

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<PureState>& point_states() const { return point_states_; }
    const std::vector<BlochVector>& directions() const { return directions_; }

private:
    std::vector<std::string> labels_;
    std::vector<PureState> point_states_;
    std::vector<BlochVector> directions_;
};

// Throw std::domain_error when a weight vector is not a distribution
// (entries >= 0, sum 1 within 1e-10) or a response leaves [0, 1] (1e-12).
void check_epistemic(std::span<const double> weights, std::size_t ontic_size);
void check_response(std::span<const double> response, std::size_t ontic_size);

/// A candidate realistic theory: epistemic map psi -> rho(.|psi) and response
/// map phi -> P(phi|.) over a finite ontic space. Both maps are checked on
/// every query.
class OntoModel {
public:
    using Map = std::function<std::vector<double>(const PureState&)>;

    OntoModel(std::string kind, std::size_t dim, OnticSpace ontic, Map weights, Map responses);

    const std::string& kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    const OnticSpace& ontic() const { return ontic_; }
    std::size_t size() const { return ontic_.size(); }

    std::vector<double> weights(const PureState& psi) const;
    std::vector<double> response(const PureState& phi) const;

private:
    std::string kind_;
    std::size_t dim_;
    OnticSpace ontic_;
    Map weights_;
    Map responses_;
};

/// sum_k P(phi|k) rho(k|psi)
double predict(const OntoModel& model, const PureState& psi, const PureState& phi, Exec exec = Exec::parallel);

/// One ontic point per listed state; rho(.|psi_i) is the indicator of point i
/// and P(phi|chi_k) = |<phi|chi_k>|^2. Preparing an unlisted state throws.
OntoModel delta_model(const std::vector<PureState>& states);

inline constexpr std::size_t kMinKsLattice = 1000;
inline constexpr double kTieTolerance = 1e-12;

/// Kochen-Specker qubit model on a Fibonacci lattice of N sphere directions:
/// rho(l|m) proportional to max(0, m.l), response 1 on the hemisphere n.l > 0,
/// 0 on the opposite one and 0.5 on ties.
OntoModel ks_model_qubit(std::size_t lattice_size);

std::vector<BlochVector> fibonacci_sphere(std::size_t n);

inline constexpr std::size_t kMinBellGrid = 100;

/// Bell-type qubit model over points (state i, lambda_j), lambda_j the M grid
/// midpoints of [0,1]. Response is 1 iff lambda_j <= |<phi|psi_i>|^2.
OntoModel bell_model_qubit(const std::vector<PureState>& states, std::size_t grid_size);

struct RegionProbability {
    double value = 0.0;
    bool clipped = false; // region extended past the sampled grid
};

/// Trapezoid integral of a 1D density sampled at x0 + i*h over [a, b],
/// linearly interpolated at the interval ends. The density must integrate to
/// 1 within 1e-6.
RegionProbability bohm_region_probability(std::span<const double> density, double x0, double h, double a,
                                          double b);

/// True iff every response to the given effects is within 1e-9 of 0 or 1.
bool check_dispersion_free(const OntoModel& model, const std::vector<PureState>& effects);

/// Tabulated form of a model on finite state/effect lists; the import/export
/// representation.
struct ModelTable {
    std::size_t dim = 0;
    std::string kind;
    std::vector<std::string> labels;
    std::vector<std::string> state_names;
    std::vector<PureState> states;
    std::vector<std::vector<double>> weights; // per state, length K
    std::vector<std::string> effect_names;
    std::vector<PureState> effects;
    std::vector<std::vector<double>> responses; // per effect, length K
};

ModelTable tabulate(const OntoModel& model, const std::vector<PureState>& states,
                    const std::vector<PureState>& effects);

/// Model answering only for the tabulated states/effects (matched up to
/// global phase).
OntoModel model_from_table(const ModelTable& table);

// ---------------------------------------------------------------------------
// Operator reconstruction

class RankDeficientError : public std::invalid_argument {
public:
    RankDeficientError(std::size_t rank, std::size_t needed);
    std::size_t rank() const { return rank_; }

private:
    std::size_t rank_;
};

/// d^2 rank-1 projector directions spanning the Hermitian operators:
/// |i>, (|i>+|j>)/sqrt2 and (|i>+i|j>)/sqrt2 for i < j.
std::vector<PureState> ic_effect_set(std::size_t dim);

/// Linear map B -> (Tr[B P_e])_e over a set of rank-1 projectors, factorized
/// once and reused for many right-hand sides. Construction checks the span
/// through the rank of the Gram matrix Tr[P_a P_b] (threshold 1e-8).
class HermitianDesign {
public:
    HermitianDesign(const std::vector<Projector>& effects, std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t rank() const { return rank_; }
    std::size_t effect_count() const { return static_cast<std::size_t>(design_.rows()); }

    /// Least-squares real parameters (d^2 x columns) for responses given as
    /// an effects x columns matrix.
    RMatrix solve(const RMatrix& responses, Exec exec = Exec::parallel) const;
    /// Max-norm residual per column of design * params - responses.
    Eigen::VectorXd residuals(const RMatrix& params, const RMatrix& responses) const;

    CMatrix to_matrix(const Eigen::Ref<const Eigen::VectorXd>& params) const;

private:
    std::size_t dim_;
    std::size_t rank_ = 0;
    RMatrix design_;
    Eigen::ColPivHouseholderQR<RMatrix> qr_;
};

inline constexpr double kReconstructionConsistencyTol = 1e-8;

struct ReconstructedOperator {
    HermitianOperator op;
    double residual = 0.0;     // max |Tr[B P_e] - r_e|
    bool inconsistent = false; // residual > 1e-8
};

/// Solves P(phi|X) = Tr[B P_phi] for B from responses to an informationally
/// complete projector set. Throws RankDeficientError naming the rank found.
ReconstructedOperator reconstruct_ontic_operator(const std::vector<Projector>& effects,
                                                 std::span<const double> responses, std::size_t dim);

// ---------------------------------------------------------------------------
// Structure check

struct ProportionalityEntry {
    std::size_t point = 0;
    std::size_t state = 0;
    double lambda = 0.0;    // <psi|B_k|psi>
    double deviation = 0.0; // ||B_k - lambda P_psi||
};

struct SupportOverlap {
    std::size_t point = 0;
    std::size_t state_a = 0;
    std::size_t state_b = 0;
};

struct TheoremReport {
    double tol = 0.0;
    std::size_t ontic_size = 0;
    std::size_t distinct_prepared = 0;

    double born_residual = 0.0;
    double reconstruction_residual = 0.0;
    std::vector<ProportionalityEntry> proportionality;
    std::vector<double> lambda_mean_residual; // per prepared state
    double born_response_residual = 0.0;
    bool supports_disjoint = true;
    std::vector<SupportOverlap> overlaps;
    std::vector<std::optional<std::size_t>> support_map; // point -> prepared index

    // Largest distance of any eigenvalue of a reconstructed B_k outside
    // [0, 1]; zero when every B_k is an effect operator.
    double operator_bound_violation = 0.0;

    double max_lambda_deviation() const;
    double max_proportionality_deviation() const;
    double max_lambda_mean_residual() const;
    bool dimension_bound_holds() const { return ontic_size >= distinct_prepared; }
    /// Every residual below tol and supports disjoint.
    bool structure_holds() const;
};

struct TheoremOptions {
    double support_threshold = 1e-12; // rho > threshold counts as support
    Exec exec = Exec::parallel;
};

TheoremReport theorem_structure_check(const OntoModel& model, const std::vector<PureState>& prepared,
                                      const std::vector<PureState>& ic_effects, double tol,
                                      const TheoremOptions& options = {});

} // namespace ontolab
