#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ontolab/commands.hpp"

int main(int argc, char** argv) {
    using namespace ontolab;

    CLI::App app{"ontolab: checks for finite ontological models of quantum states"};
    std::string command;
    std::string path;
    RunFlags flags;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::size_t ontic_size = 0, restarts = 0, lattice = 0;
    std::string out;

    app.add_option("command", command, "verify-model | theorem-check | feasibility | ks-search | chsh | wigner | bohm")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("document", path, "input JSON document")->required();
    auto* o_seed = app.add_option("--seed", seed, "random seed");
    auto* o_tol = app.add_option("--tol", tol, "tolerance for the command's checks");
    auto* o_k = app.add_option("--ontic-size", ontic_size, "number of ontic points (feasibility)");
    auto* o_r = app.add_option("--restarts", restarts, "alternation restarts (feasibility)");
    auto* o_l = app.add_option("--lattice", lattice, "lattice/grid size (ks and bell models)");
    auto* o_out = app.add_option("--out", out, "write a CSV table (or model export) here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    if (*o_seed) flags.seed = seed;
    if (*o_tol) flags.tol = tol;
    if (*o_k) flags.ontic_size = ontic_size;
    if (*o_r) flags.restarts = restarts;
    if (*o_l) flags.lattice = lattice;
    if (*o_out) flags.out = out;

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "ontolab: cannot read '" << path << "'\n";
        return kExitUsage;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    const RunResult result = run(command, buf.str(), flags);
    std::cout << result.report;
    return result.exit_code;
}
