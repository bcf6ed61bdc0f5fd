// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "ontolab/bellchsh.hpp"
#include "ontolab/documents.hpp"
#include "ontolab/dwigner.hpp"
#include "ontolab/feasopt.hpp"
#include "ontolab/kochen_specker.hpp"
#include "ontolab/onto.hpp"

using namespace ontolab;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(ONTOLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(f);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return std::string(ONTOLAB_DATA_DIR) + "/" + name; }

double born_oracle(const PureState& psi, const PureState& phi) {
    Complex amp = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) amp += std::conj(phi[i]) * psi[i];
    return std::norm(amp);
}

// 1. Delta model reproduces the Born rule.
Outcome born_reproduction() {
    double worst = 0.0;
    for (std::size_t d : {2u, 3u, 4u, 5u}) {
        std::vector<PureState> states;
        for (std::uint64_t s = 0; s < 50; ++s) states.push_back(random_pure_state(d, 1000 * d + s));
        const OntoModel model = delta_model(states);
        auto rng = seeded_engine(d, 99);
        for (int e = 0; e < 1000; ++e) {
            const PureState phi = random_pure_state(d, rng);
            for (const auto& psi : states) worst = std::max(worst, std::abs(predict(model, psi, phi) - born_oracle(psi, phi)));
        }
    }
    return {worst < 1e-12, "max |predict - Born| = " + sci(worst)};
}

// 2. Kochen-Specker qubit model.
Outcome ks_model() {
    const OntoModel ks = ks_model_qubit(200000);
    const PureState up = basis_state(2, 0);
    double worst = 0.0;
    std::vector<PureState> effects;
    for (int i = 0; i < 25; ++i) {
        const double theta = std::numbers::pi * i / 24.0;
        const PureState phi = qubit_state(BlochVector::from_angles(theta, 0.37));
        worst = std::max(worst, std::abs(predict(ks, up, phi) - (1 + std::cos(theta)) / 2));
        effects.push_back(phi);
    }
    // Exclude effects whose plane contains a lattice point (ties).
    std::vector<PureState> tie_free;
    for (const auto& e : effects) {
        const BlochVector n = bloch_vector(e);
        bool tie = false;
        for (const auto& l : ks.ontic().directions()) tie = tie || std::abs(n.dot(l)) <= kTieTolerance;
        if (!tie) tie_free.push_back(e);
    }
    const bool df = check_dispersion_free(ks, tie_free);
    return {worst < 2e-3 && df, "max error " + sci(worst) + ", dispersion-free " + (df ? "true" : "false") + " on " +
                                    std::to_string(tie_free.size()) + " tie-free effects"};
}

// 3. Theorem structure and its qubit exception.
Outcome theorem_structure() {
    std::vector<PureState> states = mub_states(3);
    for (std::uint64_t s = 0; s < 6; ++s) states.push_back(random_pure_state(3, 70 + s));
    const auto rep = theorem_structure_check(delta_model(states), states, ic_effect_set(3), 1e-9);
    const bool delta_ok = rep.reconstruction_residual < 1e-9 && rep.max_lambda_deviation() < 1e-9 && rep.supports_disjoint;
    const auto ks_rep = theorem_structure_check(ks_model_qubit(200000), {basis_state(2, 0), PureState{1.0, 1.0}},
                                                ic_effect_set(2), 1e-9);
    return {delta_ok && !ks_rep.supports_disjoint,
            "delta d=3: reconstruction " + sci(rep.reconstruction_residual) + ", lambda dev " +
                sci(rep.max_lambda_deviation()) + ", disjoint " + (rep.supports_disjoint ? "true" : "false") +
                "; KS qubit: disjoint " + (ks_rep.supports_disjoint ? "true" : "false") + " (" +
                std::to_string(ks_rep.overlaps.size()) + " shared points)"};
}

// 4. Operator reconstruction round trip.
Outcome reconstruction_round_trip() {
    const auto ic = ic_effect_set(3);
    std::vector<Projector> projectors;
    for (const auto& e : ic) projectors.emplace_back(e);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto rng = seeded_engine(s, 17);
        std::normal_distribution<double> g;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        CMatrix z(3, 3);
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(g(rng), g(rng));
        const CMatrix q = z.householderQr().householderQ();
        const Eigen::Vector3d lam(u(rng), u(rng), u(rng));
        const CMatrix b0 = q * lam.cast<Complex>().asDiagonal() * q.adjoint();
        std::vector<double> r;
        for (const auto& e : ic) r.push_back(e.amplitudes().dot(b0 * e.amplitudes()).real());
        const auto rec = reconstruct_ontic_operator(projectors, r, 3);
        worst = std::max(worst, (rec.op.matrix() - b0).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-9, "max-norm error " + sci(worst) + " over 100 operators"};
}

// 5. Certificates and forward-generated feasible instances.
Outcome certificates() {
    const FeasibilityProblem k1({basis_state(2, 0), basis_state(2, 1), PureState{1.0, 1.0}}, {basis_state(2, 0)}, 1);
    const BlockSolve single = solve_single_point(k1);
    const bool cert_ok = !single.feasible() && verify_certificate(single.program, single.outcome.certificate);
    std::size_t feasible = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto inst = forward_instance(3, 3, 6, 4, seed);
        const BlockSolve resp = solve_responses(inst.problem, inst.weights);
        bool ok = resp.feasible();
        if (ok) worst = std::max(worst, reproduction_residual(inst.problem, inst.weights, resp.block));
        for (std::size_t i = 0; ok && i < 3; ++i) {
            const BlockSolve col = solve_rho(inst.problem, inst.responses, i);
            ok = col.feasible();
            if (ok) {
                worst = std::max(worst, (inst.responses * col.block - inst.problem.targets.col(static_cast<Eigen::Index>(i)))
                                            .cwiseAbs()
                                            .maxCoeff());
            }
        }
        feasible += ok;
    }
    return {cert_ok && feasible == 100 && worst < 1e-8,
            std::string("K=1 certificate ") + (cert_ok ? "verified" : "missing") + " (gap " +
                sci(certificate_gap(single.program, single.outcome.certificate)) + "); forward instances feasible " +
                std::to_string(feasible) + "/100, max residual " + sci(worst)};
}

// 6. Dimension-bound evidence on the MUB-9 problem, through the CLI.
CliRun mub_run;
Outcome dimension_bound() {
    mub_run = run_cli("feasibility " + data("mub9_d3.json") + " --seed 1 --restarts 20");
    if (mub_run.code < 0 || mub_run.code == 2) return {false, "CLI run failed"};
    const json r = json::parse(mub_run.out);
    bool k9 = false, k1 = false;
    std::string table;
    for (const auto& row : r["results"]["table"]) {
        const int k = row["ontic_size"];
        const double res = row["best_residual"];
        if (k == 9) k9 = res < 1e-9;
        if (k == 1) k1 = row["verdict"] == "infeasible" && row.value("certificate_verified", false);
        table += " K=" + std::to_string(k) + ":" + sci(res);
    }
    return {k9 && k1 && r["options"]["restarts"] == 20, "best residuals" + table};
}

// 7. Contextuality obstruction.
Outcome contextuality() {
    std::ifstream f(data("cabello18.json"));
    std::stringstream ss;
    ss << f.rdbuf();
    const RaySet rs = parse_ray_set(ss.str());
    const auto report = validate_ray_set(rs);
    const auto count = ks_assignment_count(rs);
    RaySet single;
    single.dim = 3;
    for (std::size_t i = 0; i < 3; ++i) single.rays.push_back(basis_state(3, i).amplitudes());
    single.bases = {{0, 1, 2}};
    const auto control = ks_assignment_count(single).count;
    return {report.ok() && count.count == 0 && control == 3,
            std::to_string(report.violations.size()) + " violations, count " + std::to_string(count.count) +
                ", single-basis control " + std::to_string(control)};
}

// 8. CHSH.
Outcome chsh() {
    const auto bell = bell_states();
    const double tsirelson = 2 * std::numbers::sqrt2;
    const double standard = chsh_value(bell[0], standard_chsh_setting());
    const double horo = horodecki_max(bell[0]);
    double product_max = -10.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const PureState p = tensor_product(random_pure_state(2, 2 * s), random_pure_state(2, 2 * s + 1));
        product_max = std::max(product_max, chsh_grid_max(p, 8, 10, s).value);
    }
    double excess = -10.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const PureState psi = random_pure_state(4, 5000 + s);
        excess = std::max(excess, chsh_grid_max(psi, 8, 10, s).value - horodecki_max(psi));
    }
    const bool ok = std::abs(standard - tsirelson) < 1e-12 && std::abs(horo - tsirelson) < 1e-12 &&
                    product_max <= 2 + 1e-9 && excess <= 1e-6;
    return {ok, "standard " + sci(standard - tsirelson) + " off 2sqrt2, Horodecki " + sci(horo - tsirelson) +
                    " off, product max " + std::to_string(product_max) + ", max grid - Horodecki " + sci(excess)};
}

// 9. Discrete Wigner function.
Outcome wigner_checks() {
    double pps_err = 0.0, sum_err = 0.0, marg_err = 0.0, trip_err = 0.0, best_neg = 0.0;
    for (std::size_t d : {3u, 5u}) {
        const PhasePointSet pps(d);
        for (std::size_t a = 0; a < d * d; ++a) {
            const CMatrix& x = pps.at(a / d, a % d);
            pps_err = std::max(pps_err, std::abs(x.trace() - Complex(1.0)));
            for (std::size_t b = 0; b < d * d; ++b) {
                const Complex t = (x * pps.at(b / d, b % d)).trace();
                pps_err = std::max(pps_err, std::abs(t - Complex(a == b ? static_cast<double>(d) : 0.0)));
            }
        }
        for (std::uint64_t s = 0; s < 100; ++s) {
            const PureState psi = random_pure_state(d, 300 + s);
            const WignerTable t = wigner(psi, pps);
            sum_err = std::max(sum_err, std::abs(t.sum() - 1.0));
            for (std::size_t k = 0; k < d; ++k) {
                marg_err = std::max(marg_err, std::abs(t.position_marginal()(static_cast<Eigen::Index>(k)) - std::norm(psi[k])));
                marg_err = std::max(marg_err, std::abs(t.momentum_marginal()(static_cast<Eigen::Index>(k)) -
                                                       born_oracle(psi, fourier_state(d, k))));
            }
            trip_err = std::max(trip_err,
                                (reconstruct_from_wigner(t, pps).matrix() - Projector(psi).matrix()).cwiseAbs().maxCoeff());
            best_neg = std::max(best_neg, negativity(t));
        }
    }
    const bool ok = pps_err < 1e-10 && sum_err < 1e-10 && marg_err < 1e-10 && trip_err < 1e-10 && best_neg > 0.01;
    return {ok, "operator invariants " + sci(pps_err) + ", sum " + sci(sum_err) + ", marginals " + sci(marg_err) +
                    ", round trip " + sci(trip_err) + ", best negativity " + sci(best_neg)};
}

// 10. Byte-identical CLI reports.
Outcome reproducibility() {
    const std::vector<std::string> runs{
        "verify-model " + data("delta_d3.json"), "verify-model " + data("ks_qubit.json"),
        "theorem-check " + data("delta_d3.json"), "ks-search " + data("cabello18.json"),
        "chsh " + data("bell_states.json") + " --seed 7", "wigner " + data("wigner_d3.json"),
        "bohm " + data("bohm_gaussian.json")};
    std::size_t same = 0;
    for (const auto& args : runs) {
        const CliRun a = run_cli(args), b = run_cli(args);
        same += a.code == b.code && a.code >= 0 && a.out == b.out && !a.out.empty();
    }
    const CliRun again = run_cli("feasibility " + data("mub9_d3.json") + " --seed 1 --restarts 20");
    same += again.code == mub_run.code && again.out == mub_run.out && !again.out.empty();
    const std::size_t total = runs.size() + 1;
    return {same == total, std::to_string(same) + "/" + std::to_string(total) + " CLI runs byte-identical on repeat"};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds; // 0: no runtime limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "Born reproduction (delta model)", 10, born_reproduction},
        {2, "Kochen-Specker qubit model", 30, ks_model},
        {3, "theorem structure and qubit exception", 0, theorem_structure},
        {4, "operator reconstruction round trip", 0, reconstruction_round_trip},
        {5, "infeasibility certificates and forward instances", 0, certificates},
        {6, "dimension-bound evidence (MUB-9)", 300, dimension_bound},
        {7, "contextuality obstruction (Cabello-18)", 1, contextuality},
        {8, "CHSH", 120, chsh},
        {9, "discrete Wigner function", 0, wigner_checks},
        {10, "reproducibility", 0, reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            o.pass = false;
            o.detail += "; runtime limit " + std::to_string(static_cast<int>(c.limit_seconds)) + " s exceeded";
        }
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " (" << timing
                  << ")" << std::endl;
        failed += !o.pass;
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria passed")
              << std::endl;
    return failed ? 1 : 0;
}
