#include "ontolab/onto.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_set>

namespace ontolab {

OnticSpace::OnticSpace(std::vector<std::string> labels, std::vector<PureState> point_states,
                       std::vector<BlochVector> directions)
    : labels_(std::move(labels)), point_states_(std::move(point_states)), directions_(std::move(directions)) {
    if (labels_.empty()) throw std::invalid_argument("ontic space needs at least one point");
    std::unordered_set<std::string> seen;
    seen.reserve(labels_.size());
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw std::invalid_argument("duplicate ontic label '" + l + "'");
    }
    if (!point_states_.empty() && point_states_.size() != labels_.size()) {
        throw std::invalid_argument("ontic point states must match the number of labels");
    }
    if (!directions_.empty() && directions_.size() != labels_.size()) {
        throw std::invalid_argument("ontic directions must match the number of labels");
    }
}

void check_epistemic(std::span<const double> weights, std::size_t ontic_size) {
    if (weights.size() != ontic_size) {
        throw std::domain_error("epistemic weights have length " + std::to_string(weights.size()) + ", expected " +
                                std::to_string(ontic_size));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] >= 0.0)) {
            throw std::domain_error("negative epistemic weight at point " + std::to_string(k));
        }
        total += weights[k];
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw std::domain_error("epistemic weights sum to " + std::to_string(total));
    }
}

void check_response(std::span<const double> response, std::size_t ontic_size) {
    if (response.size() != ontic_size) {
        throw std::domain_error("response has length " + std::to_string(response.size()) + ", expected " +
                                std::to_string(ontic_size));
    }
    for (std::size_t k = 0; k < response.size(); ++k) {
        if (!(response[k] >= -1e-12 && response[k] <= 1.0 + 1e-12)) {
            throw std::domain_error("response outside [0,1] at point " + std::to_string(k));
        }
    }
}

OntoModel::OntoModel(std::string kind, std::size_t dim, OnticSpace ontic, Map weights, Map responses)
    : kind_(std::move(kind)), dim_(dim), ontic_(std::move(ontic)), weights_(std::move(weights)),
      responses_(std::move(responses)) {
    if (dim_ < 2) throw std::invalid_argument("model dimension must be >= 2");
}

std::vector<double> OntoModel::weights(const PureState& psi) const {
    require_same_dim(psi.dim(), dim_, "epistemic map");
    auto w = weights_(psi);
    check_epistemic(w, size());
    return w;
}

std::vector<double> OntoModel::response(const PureState& phi) const {
    require_same_dim(phi.dim(), dim_, "response map");
    auto r = responses_(phi);
    check_response(r, size());
    return r;
}

double predict(const OntoModel& model, const PureState& psi, const PureState& phi, Exec exec) {
    const auto w = model.weights(psi);
    const auto r = model.response(phi);
    return kernels::weighted_sum(exec, r, w);
}

namespace {

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

constexpr double kLookupTol = 1e-10;

std::size_t find_listed(const std::vector<PureState>& states, const PureState& psi, const char* what) {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (same_ray(states[i], psi, kLookupTol)) return i;
    }
    throw std::invalid_argument(std::string(what) + ": state is not one of the model's listed states");
}

} // namespace

OntoModel delta_model(const std::vector<PureState>& states) {
    if (states.empty()) throw std::invalid_argument("delta_model: empty state list");
    const std::size_t d = states.front().dim();
    for (std::size_t i = 0; i < states.size(); ++i) {
        require_same_dim(states[i].dim(), d, "delta_model");
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(inner(states[i], states[j])) >= 1.0 - 1e-12) {
                throw std::invalid_argument("delta_model: states " + std::to_string(j) + " and " + std::to_string(i) +
                                            " are equal up to phase");
            }
        }
    }
    auto points = std::make_shared<const std::vector<PureState>>(states);
    auto weights = [points](const PureState& psi) {
        std::vector<double> w(points->size(), 0.0);
        w[find_listed(*points, psi, "delta_model")] = 1.0;
        return w;
    };
    auto responses = [points](const PureState& phi) {
        std::vector<double> r(points->size());
        for (std::size_t k = 0; k < points->size(); ++k) r[k] = born_probability(phi, (*points)[k]);
        return r;
    };
    return OntoModel("delta", d, OnticSpace(numbered("chi", states.size()), states), weights, responses);
}

std::vector<BlochVector> fibonacci_sphere(std::size_t n) {
    std::vector<BlochVector> pts(n);
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        pts[i] = BlochVector{{r * std::cos(phi), r * std::sin(phi), z}};
    }
    return pts;
}

OntoModel ks_model_qubit(std::size_t lattice_size) {
    if (lattice_size < kMinKsLattice) {
        throw std::invalid_argument("ks_model_qubit: lattice_size must be >= " + std::to_string(kMinKsLattice));
    }
    auto lattice = std::make_shared<const std::vector<BlochVector>>(fibonacci_sphere(lattice_size));
    auto weights = [lattice](const PureState& psi) {
        std::vector<double> w(lattice->size());
        kernels::parallel::clipped_cosine_weights(*lattice, bloch_vector(psi), w);
        return w;
    };
    auto responses = [lattice](const PureState& phi) {
        std::vector<double> r(lattice->size());
        kernels::parallel::hemisphere_response(*lattice, bloch_vector(phi), kTieTolerance, r);
        return r;
    };
    return OntoModel("ks", 2, OnticSpace(numbered("l", lattice_size), {}, *lattice), weights, responses);
}

OntoModel bell_model_qubit(const std::vector<PureState>& states, std::size_t grid_size) {
    if (grid_size < kMinBellGrid) {
        throw std::invalid_argument("bell_model_qubit: grid_size must be >= " + std::to_string(kMinBellGrid));
    }
    if (states.empty()) throw std::invalid_argument("bell_model_qubit: empty state list");
    for (const auto& s : states) require_same_dim(s.dim(), 2, "bell_model_qubit");

    std::vector<std::string> labels;
    labels.reserve(states.size() * grid_size);
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < grid_size; ++j) labels.push_back("s" + std::to_string(i) + ":l" + std::to_string(j));
    }
    auto listed = std::make_shared<const std::vector<PureState>>(states);
    const std::size_t m = grid_size;
    auto weights = [listed, m](const PureState& psi) {
        std::vector<double> w(listed->size() * m, 0.0);
        const std::size_t i = find_listed(*listed, psi, "bell_model_qubit");
        std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(i * m), m, 1.0 / static_cast<double>(m));
        return w;
    };
    auto responses = [listed, m](const PureState& phi) {
        std::vector<double> r(listed->size() * m);
        for (std::size_t i = 0; i < listed->size(); ++i) {
            const double p = born_probability(phi, (*listed)[i]);
            for (std::size_t j = 0; j < m; ++j) {
                const double lambda = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
                r[i * m + j] = lambda <= p ? 1.0 : 0.0;
            }
        }
        return r;
    };
    return OntoModel("bell", 2, OnticSpace(std::move(labels)), weights, responses);
}

RegionProbability bohm_region_probability(std::span<const double> density, double x0, double h, double a,
                                          double b) {
    if (a > b) throw std::invalid_argument("bohm_region_probability: region start exceeds its end");
    if (density.size() < 2 || !(h > 0.0)) throw std::invalid_argument("bohm_region_probability: need >= 2 samples and h > 0");
    for (double f : density) {
        if (!(f >= 0.0)) throw std::invalid_argument("bohm_region_probability: density must be nonnegative");
    }
    const std::size_t n = density.size();
    // cumulative[i] = integral from x0 to x_i of the piecewise-linear interpolant
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) cumulative[i] = cumulative[i - 1] + 0.5 * h * (density[i - 1] + density[i]);
    if (std::abs(cumulative.back() - 1.0) > 1e-6) {
        throw std::invalid_argument("bohm_region_probability: density integrates to " +
                                    std::to_string(cumulative.back()) + ", expected 1");
    }
    const double x_end = x0 + h * static_cast<double>(n - 1);
    const double edge_tol = 1e-12 * std::max({1.0, std::abs(x0), std::abs(x_end)});
    RegionProbability out;
    out.clipped = a < x0 - edge_tol || b > x_end + edge_tol;
    const double lo = std::clamp(a, x0, x_end);
    const double hi = std::clamp(b, x0, x_end);
    if (lo >= hi) return out;

    auto antiderivative = [&](double x) {
        const double s = (x - x0) / h;
        auto i = static_cast<std::size_t>(std::floor(s));
        i = std::min(i, n - 2);
        const double t = s - static_cast<double>(i);
        return cumulative[i] + h * (density[i] * t + 0.5 * (density[i + 1] - density[i]) * t * t);
    };
    out.value = antiderivative(hi) - antiderivative(lo);
    return out;
}

bool check_dispersion_free(const OntoModel& model, const std::vector<PureState>& effects) {
    for (const auto& phi : effects) {
        for (double r : model.response(phi)) {
            if (std::abs(r) > 1e-9 && std::abs(r - 1.0) > 1e-9) return false;
        }
    }
    return true;
}

ModelTable tabulate(const OntoModel& model, const std::vector<PureState>& states,
                    const std::vector<PureState>& effects) {
    ModelTable t;
    t.dim = model.dim();
    t.kind = model.kind();
    t.labels = model.ontic().labels();
    t.states = states;
    t.effects = effects;
    t.state_names = numbered("psi", states.size());
    t.effect_names = numbered("phi", effects.size());
    for (const auto& s : states) t.weights.push_back(model.weights(s));
    for (const auto& e : effects) t.responses.push_back(model.response(e));
    return t;
}

OntoModel model_from_table(const ModelTable& table) {
    if (table.weights.size() != table.states.size() || table.responses.size() != table.effects.size()) {
        throw std::invalid_argument("model table: vectors and state/effect lists differ in length");
    }
    const std::size_t k = table.labels.size();
    for (const auto& w : table.weights) check_epistemic(w, k);
    for (const auto& r : table.responses) check_response(r, k);
    auto data = std::make_shared<const ModelTable>(table);
    auto weights = [data](const PureState& psi) {
        return data->weights[find_listed(data->states, psi, "tabulated model")];
    };
    auto responses = [data](const PureState& phi) {
        return data->responses[find_listed(data->effects, phi, "tabulated model")];
    };
    return OntoModel("table", table.dim, OnticSpace(table.labels), weights,
                     responses);
}

} // namespace ontolab
