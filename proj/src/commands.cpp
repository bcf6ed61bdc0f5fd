#include "ontolab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ontolab/bellchsh.hpp"
#include "ontolab/documents.hpp"
#include "ontolab/dwigner.hpp"
#include "ontolab/feasopt.hpp"
#include "ontolab/kochen_specker.hpp"
#include "ontolab/onto.hpp"

namespace ontolab {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"verify-model", "theorem-check", "feasibility", "ks-search",
                                                "chsh",         "wigner",        "bohm"};
    return names;
}

namespace {

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resolved options, result payload and tolerance checks of one run.
class Context {
public:
    Context(const json& doc_options, const RunFlags& flags) : doc_(doc_options), flags_(flags) {}

    template <class T>
    T opt(const std::string& name, const std::optional<T>& flag, T fallback) {
        T value = fallback;
        std::string source = "default";
        if (flag) {
            value = *flag;
            source = "flag";
        } else if (doc_.contains(name)) {
            try {
                value = doc_.at(name).get<T>();
            } catch (const json::exception&) {
                throw DocumentError("option '" + name + "' has the wrong type");
            }
            source = "document";
        }
        options[name] = value;
        sources[name] = source;
        return value;
    }

    template <class T>
    T opt(const std::string& name, T fallback) {
        return opt<T>(name, std::optional<T>{}, fallback);
    }

    bool has_doc_option(const std::string& name) const { return doc_.contains(name); }
    const json& doc_option(const std::string& name) const { return doc_.at(name); }

    void check(const std::string& name, bool pass, double value, double tolerance) {
        checks.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
        all_pass = all_pass && pass;
    }
    void check(const std::string& name, bool pass) {
        checks.push_back({{"name", name}, {"pass", pass}});
        all_pass = all_pass && pass;
    }

    ojson options = ojson::object();
    ojson sources = ojson::object();
    ojson results = ojson::object();
    ojson checks = ojson::array();
    bool all_pass = true;

private:
    const json& doc_;
    const RunFlags& flags_;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    return row + '\n';
}

ojson matrix_json(const RMatrix& m) {
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void require_states(const ProblemDocument& doc) {
    if (doc.states.states.empty()) throw DocumentError("document lists no states");
}

// ---------------------------------------------------------------------------

struct BuiltModel {
    OntoModel model;
    double default_tol;
};

BuiltModel build_model(Context& ctx, const ProblemDocument& doc, const RunFlags& flags) {
    const std::string kind = ctx.opt<std::string>("model", doc.raw.contains("ontic") ? "table" : "delta");
    if (kind == "delta") return {delta_model(doc.states.states), 1e-12};
    if (kind == "ks") {
        const auto n = ctx.opt<std::size_t>("lattice", flags.lattice, 200000);
        return {ks_model_qubit(n), 2e-3};
    }
    if (kind == "bell") {
        const auto m = ctx.opt<std::size_t>("lattice", flags.lattice, 1000);
        return {bell_model_qubit(doc.states.states, m), 0.5 / static_cast<double>(m) + 1e-12};
    }
    if (kind == "table") {
        const json& src = doc.raw.contains("ontic") ? doc.raw : doc.raw.at("model");
        return {model_from_table(model_table_from_json(src)), 1e-9};
    }
    throw DocumentError("unknown model '" + kind + "' (expected delta, ks, bell or table)");
}

void cmd_verify_model(Context& ctx, const ProblemDocument& doc, const RunFlags& flags) {
    require_states(doc);
    BuiltModel built = build_model(ctx, doc, flags);
    const double tol = ctx.opt<double>("tol", flags.tol, built.default_tol);
    const auto& states = doc.states.states;
    const auto& effects = doc.effects.states;

    RMatrix predicted(static_cast<Eigen::Index>(effects.size()), static_cast<Eigen::Index>(states.size()));
    bool invariants_ok = true;
    std::string invariant_error;
    try {
        for (std::size_t j = 0; j < effects.size(); ++j) {
            for (std::size_t i = 0; i < states.size(); ++i) {
                predicted(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                    predict(built.model, states[i], effects[j]);
            }
        }
    } catch (const std::domain_error& e) {
        invariants_ok = false;
        invariant_error = e.what();
    }
    ctx.results["model"] = built.model.kind();
    ctx.results["dim"] = built.model.dim();
    ctx.results["ontic_size"] = built.model.size();
    ctx.check("model_invariants", invariants_ok);
    if (!invariants_ok) {
        ctx.results["invariant_error"] = invariant_error;
        return;
    }
    const double residual = (predicted - target_matrix(states, effects)).cwiseAbs().maxCoeff();
    ctx.results["born_residual"] = residual;
    ctx.results["predictions"] = matrix_json(predicted);
    ctx.results["dispersion_free"] = check_dispersion_free(built.model, effects);
    ctx.check("born_residual", residual <= tol, residual, tol);

    if (flags.out) {
        const ModelTable table = tabulate(built.model, states, effects);
        ModelTable named = table;
        named.state_names = doc.states.names;
        named.effect_names = doc.effects.names;
        write_text(*flags.out, model_table_to_json(named).dump(1) + "\n");
    }
}

void cmd_theorem_check(Context& ctx, const ProblemDocument& doc, const RunFlags& flags) {
    require_states(doc);
    BuiltModel built = build_model(ctx, doc, flags);
    const double tol = ctx.opt<double>("tol", flags.tol, 1e-9);
    TheoremOptions topt;
    topt.support_threshold = ctx.opt<double>("support_threshold", 1e-12);
    const std::string expect = ctx.opt<std::string>("expect", "holds");
    if (expect != "holds" && expect != "violated") throw DocumentError("option 'expect' must be 'holds' or 'violated'");

    const auto effects = ic_effect_set(doc.dim);
    const TheoremReport rep = theorem_structure_check(built.model, doc.states.states, effects, tol, topt);

    auto& r = ctx.results;
    r["model"] = built.model.kind();
    r["ontic_size"] = rep.ontic_size;
    r["distinct_prepared"] = rep.distinct_prepared;
    r["born_residual"] = rep.born_residual;
    r["reconstruction_residual"] = rep.reconstruction_residual;
    r["max_lambda_deviation"] = rep.max_lambda_deviation();
    r["max_proportionality_deviation"] = rep.max_proportionality_deviation();
    r["lambda_mean_residual"] = rep.lambda_mean_residual;
    r["born_response_residual"] = rep.born_response_residual;
    r["operator_bound_violation"] = rep.operator_bound_violation;
    r["supports_disjoint"] = rep.supports_disjoint;
    r["overlap_count"] = rep.overlaps.size();
    ojson first = ojson::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(rep.overlaps.size(), 10); ++i) {
        const auto& o = rep.overlaps[i];
        first.push_back({built.model.ontic().labels()[o.point], doc.states.names[o.state_a], doc.states.names[o.state_b]});
    }
    r["first_overlaps"] = first;
    std::vector<std::size_t> support_counts(doc.states.states.size(), 0);
    for (const auto& s : rep.support_map) {
        if (s) ++support_counts[*s];
    }
    ojson counts = ojson::object();
    for (std::size_t i = 0; i < support_counts.size(); ++i) counts[doc.states.names[i]] = support_counts[i];
    r["support_points"] = counts;
    r["dimension_bound_holds"] = rep.dimension_bound_holds();
    r["structure_holds"] = rep.structure_holds();

    if (expect == "holds") {
        ctx.check("born_residual", rep.born_residual < tol, rep.born_residual, tol);
        ctx.check("reconstruction_residual", rep.reconstruction_residual < tol, rep.reconstruction_residual, tol);
        ctx.check("lambda_unity", rep.max_lambda_deviation() < tol, rep.max_lambda_deviation(), tol);
        ctx.check("born_response_residual", rep.born_response_residual < tol, rep.born_response_residual, tol);
        ctx.check("supports_disjoint", rep.supports_disjoint);
        ctx.check("structure_holds", rep.structure_holds());
        ctx.check("dimension_bound", rep.dimension_bound_holds());
    } else {
        ctx.check("supports_overlap", !rep.supports_disjoint);
    }

    if (flags.out) {
        std::string csv = csv_row({"point", "label", "state", "lambda", "deviation"});
        for (const auto& p : rep.proportionality) {
            csv += csv_row({std::to_string(p.point), built.model.ontic().labels()[p.point], doc.states.names[p.state],
                            format_double(p.lambda), format_double(p.deviation)});
        }
        write_text(*flags.out, csv);
    }
}

void cmd_feasibility(Context& ctx, const ProblemDocument& doc, const RunFlags& flags) {
    require_states(doc);
    std::vector<std::size_t> sizes;
    if (flags.ontic_size) {
        sizes = {ctx.opt<std::size_t>("ontic_size", flags.ontic_size, 0)};
    } else if (ctx.has_doc_option("ontic_sizes")) {
        sizes = ctx.opt<std::vector<std::size_t>>("ontic_sizes", {});
    } else {
        sizes = {ctx.opt<std::size_t>("ontic_size", doc.states.states.size())};
    }
    AlternationOptions aopt;
    aopt.restarts = ctx.opt<std::size_t>("restarts", flags.restarts, 20);
    aopt.max_iters = ctx.opt<std::size_t>("max_iters", 200);
    aopt.seed = ctx.opt<std::uint64_t>("seed", flags.seed, 1);
    const double tol = ctx.opt<double>("tol", flags.tol, 1e-9);
    std::map<std::string, std::string> expect;
    if (ctx.has_doc_option("expect")) expect = ctx.opt<std::map<std::string, std::string>>("expect", {});

    ojson table = ojson::array();
    std::string csv = csv_row({"ontic_size", "restart", "final_residual", "iterations"});
    for (std::size_t k : sizes) {
        if (k == 0) throw DocumentError("ontic sizes must be >= 1");
        const FeasibilityProblem problem(doc.states.states, doc.effects.states, k);
        const AlternationReport rep = alternate_search(problem, aopt);

        bool monotone = true;
        for (const auto& trace : rep.traces) {
            for (std::size_t t = 1; t < trace.size(); ++t) monotone = monotone && trace[t] <= trace[t - 1];
        }
        ojson row;
        row["ontic_size"] = k;
        row["best_residual"] = rep.best_residual;
        row["best_restart"] = rep.best_restart;
        row["restart_residuals"] = rep.restart_best;
        row["lp_failures"] = rep.lp_failures;
        std::string verdict = rep.best_residual < tol ? "feasible" : "undecided";
        if (k == 1) {
            const BlockSolve exact = solve_single_point(problem);
            if (exact.feasible()) {
                verdict = "feasible";
            } else {
                const bool verified = verify_certificate(exact.program, exact.outcome.certificate);
                row["certificate_verified"] = verified;
                row["certificate_gap"] = certificate_gap(exact.program, exact.outcome.certificate);
                if (verified) verdict = "infeasible";
            }
        }
        row["verdict"] = verdict;
        table.push_back(row);
        ctx.check("trace_monotone[K=" + std::to_string(k) + "]", monotone);
        if (auto it = expect.find(std::to_string(k)); it != expect.end()) {
            ctx.check("expect[K=" + std::to_string(k) + "]=" + it->second, verdict == it->second, rep.best_residual, tol);
        }
        for (std::size_t r = 0; r < rep.restarts; ++r) {
            csv += csv_row({std::to_string(k), std::to_string(r), format_double(rep.restart_best[r]),
                            std::to_string(rep.iterations[r])});
        }
    }
    ctx.results["states"] = doc.states.states.size();
    ctx.results["effects"] = doc.effects.states.size();
    ctx.results["table"] = table;
    if (flags.out) write_text(*flags.out, csv);
}

void cmd_ks_search(Context& ctx, const json& raw) {
    const RaySet rs = ray_set_from_json(raw);
    const RaySetReport rep = validate_ray_set(rs);
    ctx.results["dim"] = rs.dim;
    ctx.results["rays"] = rs.rays.size();
    ctx.results["bases"] = rs.bases.size();
    ctx.results["violations"] = rep.violations;
    ctx.check("ray_set_valid", rep.ok());
    if (!rep.ok()) return;
    const AssignmentCount count = ks_assignment_count(rs);
    ctx.results["assignment_count"] = count.count;
    ojson listed = ojson::array();
    if (count.assignments) {
        for (std::size_t i = 0; i < std::min<std::size_t>(count.assignments->size(), 20); ++i) {
            listed.push_back((*count.assignments)[i]);
        }
    }
    ctx.results["first_assignments"] = listed;
    if (ctx.has_doc_option("expect_count")) {
        const auto expected = ctx.opt<std::uint64_t>("expect_count", 0);
        ctx.check("assignment_count", count.count == expected, static_cast<double>(count.count), 0.0);
    }
}

void cmd_chsh(Context& ctx, const ProblemDocument& doc, const RunFlags& flags) {
    require_states(doc);
    if (doc.dim != 4) throw DocumentError("chsh needs two-qubit states (dim 4)");
    const auto steps = ctx.opt<std::size_t>("coarse_steps", 8);
    const auto iters = ctx.opt<std::size_t>("refine_iters", 10);
    const auto seed = ctx.opt<std::uint64_t>("seed", flags.seed, 1);
    const double tol = ctx.opt<double>("tol", flags.tol, 1e-9);
    std::optional<double> expect;
    if (ctx.has_doc_option("expect_max")) expect = ctx.opt<double>("expect_max", 0.0);
    if (steps < 8) throw DocumentError("coarse_steps must be >= 8");

    ojson rows = ojson::array();
    std::string csv = csv_row({"state", "theta_a", "phi_a", "theta_a2", "phi_a2", "theta_b", "phi_b", "theta_b2", "phi_b2",
                               "chsh_value", "horodecki_bound"});
    for (std::size_t i = 0; i < doc.states.states.size(); ++i) {
        const auto& psi = doc.states.states[i];
        const std::string& name = doc.states.names[i];
        const double bound = horodecki_max(psi);
        const ChshSearchResult best = chsh_grid_max(psi, steps, iters, seed);
        rows.push_back({{"state", name},
                        {"horodecki_max", bound},
                        {"grid_value", best.grid_value},
                        {"refined_value", best.value},
                        {"angles", best.angles.values}});
        ctx.check("grid_below_bound[" + name + "]", best.value <= bound + 1e-6, best.value - bound, 1e-6);
        if (expect) ctx.check("horodecki_max[" + name + "]", std::abs(bound - *expect) <= tol, std::abs(bound - *expect), tol);
        std::vector<std::string> cells{name};
        for (double a : best.angles.values) cells.push_back(format_double(a));
        cells.push_back(format_double(best.value));
        cells.push_back(format_double(bound));
        csv += csv_row(cells);
    }
    ctx.results["states"] = rows;
    if (flags.out) write_text(*flags.out, csv);
}

void cmd_wigner(Context& ctx, const ProblemDocument& doc, const RunFlags& flags) {
    require_states(doc);
    if (!is_odd_prime(doc.dim)) throw DocumentError("wigner needs an odd prime dim");
    const double tol = ctx.opt<double>("tol", flags.tol, 1e-10);
    const PhasePointSet pps(doc.dim);
    const auto d = static_cast<Eigen::Index>(doc.dim);

    std::vector<std::string> header{"state", "q"};
    for (Eigen::Index p = 0; p < d; ++p) header.push_back("p" + std::to_string(p));
    std::string csv = csv_row(header);
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < doc.states.states.size(); ++i) {
        const auto& psi = doc.states.states[i];
        const std::string& name = doc.states.names[i];
        const WignerTable t = wigner(psi, pps);
        double pos_err = 0.0, mom_err = 0.0;
        for (Eigen::Index q = 0; q < d; ++q) {
            pos_err = std::max(pos_err, std::abs(t.position_marginal()(q) - std::norm(psi[static_cast<std::size_t>(q)])));
            mom_err = std::max(mom_err, std::abs(t.momentum_marginal()(q) -
                                                 born_probability(fourier_state(doc.dim, static_cast<std::size_t>(q)), psi)));
        }
        const double roundtrip =
            (reconstruct_from_wigner(t, pps).matrix() - Projector(psi).matrix()).cwiseAbs().maxCoeff();
        const double neg = negativity(t);
        rows.push_back({{"state", name},
                        {"summary", "sum=" + format_double(t.sum()) + " min=" + format_double(t.min()) +
                                        " negativity=" + format_double(neg)},
                        {"sum", t.sum()},
                        {"min", t.min()},
                        {"negativity", neg},
                        {"marginal_error_q", pos_err},
                        {"marginal_error_p", mom_err},
                        {"roundtrip_error", roundtrip}});
        ctx.check("sum[" + name + "]", std::abs(t.sum() - 1.0) <= tol, std::abs(t.sum() - 1.0), tol);
        ctx.check("marginals[" + name + "]", std::max(pos_err, mom_err) <= tol, std::max(pos_err, mom_err), tol);
        ctx.check("roundtrip[" + name + "]", roundtrip <= tol, roundtrip, tol);
        for (Eigen::Index q = 0; q < d; ++q) {
            std::vector<std::string> cells{name, std::to_string(q)};
            for (Eigen::Index p = 0; p < d; ++p) cells.push_back(format_double(t.values(q, p)));
            csv += csv_row(cells);
        }
    }
    ctx.results["states"] = rows;
    if (flags.out) write_text(*flags.out, csv);
}

void cmd_bohm(Context& ctx, const json& raw, const RunFlags& flags) {
    if (!raw.contains("density") || !raw["density"].is_object()) throw DocumentError("bohm document needs a 'density' object");
    if (!raw.contains("region") || !raw["region"].is_array() || raw["region"].size() != 2) {
        throw DocumentError("bohm document needs 'region': [a, b]");
    }
    const json& dens = raw["density"];
    std::vector<double> samples;
    double x0 = 0.0, h = 0.0;
    try {
        x0 = dens.at("x0").get<double>();
        h = dens.at("h").get<double>();
        if (dens.contains("samples")) {
            samples = dens["samples"].get<std::vector<double>>();
        } else if (dens.contains("gaussian")) {
            const double mean = dens["gaussian"].value("mean", 0.0);
            const double sigma = dens["gaussian"].value("sigma", 1.0);
            const auto n = dens.at("n").get<std::size_t>();
            for (std::size_t i = 0; i < n; ++i) {
                const double z = (x0 + h * static_cast<double>(i) - mean) / sigma;
                samples.push_back(std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * 3.14159265358979323846)));
            }
        } else {
            throw DocumentError("density needs 'samples' or a 'gaussian' generator");
        }
    } catch (const json::exception& e) {
        throw DocumentError(std::string("bad density specification: ") + e.what());
    }
    const double a = raw["region"][0].get<double>();
    const double b = raw["region"][1].get<double>();
    const double tol = ctx.opt<double>("tol", flags.tol, 1e-6);
    const RegionProbability p = bohm_region_probability(samples, x0, h, a, b);
    ctx.results["samples"] = samples.size();
    ctx.results["region"] = {a, b};
    ctx.results["probability"] = p.value;
    ctx.results["clipped"] = p.clipped;
    if (ctx.has_doc_option("expect")) {
        const double expected = ctx.opt<double>("expect", 0.0);
        ctx.check("probability", std::abs(p.value - expected) <= tol, std::abs(p.value - expected), tol);
    }
}

} // namespace

RunResult run(const std::string& command, std::string_view document, const RunFlags& flags) {
    ojson report;
    report["command"] = command;
    report["input_digest"] = "fnv1a64:" + fnv1a64_hex(document);
    RunResult out;
    const json empty = json::object();
    try {
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), command) == names.end()) {
            throw UsageError("unknown command '" + command + "'");
        }
        const json raw = parse_json(document);
        if (!raw.is_object()) throw DocumentError("document must be a JSON object");
        const json& doc_options = raw.contains("options") && raw["options"].is_object() ? raw["options"] : empty;
        Context ctx(doc_options, flags);
        try {
            if (command == "ks-search") {
                cmd_ks_search(ctx, raw);
            } else if (command == "bohm") {
                cmd_bohm(ctx, raw, flags);
            } else {
                const ProblemDocument doc = parse_problem(document);
                if (command == "verify-model") cmd_verify_model(ctx, doc, flags);
                if (command == "theorem-check") cmd_theorem_check(ctx, doc, flags);
                if (command == "feasibility") cmd_feasibility(ctx, doc, flags);
                if (command == "chsh") cmd_chsh(ctx, doc, flags);
                if (command == "wigner") cmd_wigner(ctx, doc, flags);
            }
        } catch (const DocumentError&) {
            throw;
        } catch (const std::exception& e) {
            // Numerical or contract failure inside a module.
            ctx.options.swap(report["options"]);
            report["option_sources"] = ctx.sources;
            report["error"] = e.what();
            report["pass"] = false;
            out.exit_code = kExitCheckFailed;
            out.report = report.dump(2) + "\n";
            return out;
        }
        report["options"] = ctx.options;
        report["option_sources"] = ctx.sources;
        report["results"] = ctx.results;
        report["checks"] = ctx.checks;
        report["pass"] = ctx.all_pass;
        out.exit_code = ctx.all_pass ? kExitPass : kExitCheckFailed;
    } catch (const std::exception& e) {
        report["error"] = e.what();
        report["pass"] = false;
        out.exit_code = kExitUsage;
    }
    out.report = report.dump(2) + "\n";
    return out;
}

} // namespace ontolab
