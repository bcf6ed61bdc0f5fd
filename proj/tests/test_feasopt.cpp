#include <doctest.h>

#include <cmath>

#include "ontolab/feasopt.hpp"

using namespace ontolab;

namespace {

const PureState zero{1.0, 0.0}, one{0.0, 1.0}, plus{1.0, 1.0};

void check_valid_pair(const FeasibilityProblem& p, const RMatrix& w, const RMatrix& r) {
    CHECK(w.minCoeff() >= 0.0);
    for (Eigen::Index i = 0; i < w.cols(); ++i) CHECK(std::abs(w.col(i).sum() - 1.0) < 1e-10);
    CHECK(r.minCoeff() >= 0.0);
    CHECK(r.maxCoeff() <= 1.0);
    CHECK(w.rows() == static_cast<Eigen::Index>(p.ontic_size));
}

} // namespace

TEST_CASE("target matrix") {
    const RMatrix t = target_matrix({zero, one, plus}, {zero});
    CHECK(t.rows() == 1);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(0, 1) == 0.0);
    CHECK(std::abs(t(0, 2) - 0.5) < 1e-15);

    std::vector<PureState> s;
    for (std::uint64_t i = 0; i < 5; ++i) s.push_back(random_pure_state(3, i));
    const RMatrix d = target_matrix(s, s);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(d(i, i) - 1.0) < 1e-14);
    for (Eigen::Index j = 0; j < 5; ++j) {
        for (Eigen::Index i = 0; i < 5; ++i) {
            CHECK(std::abs(d(j, i) - std::norm(s[j].amplitudes().dot(s[i].amplitudes()))) < 1e-12);
        }
    }
    CHECK_THROWS_AS(target_matrix({zero}, {basis_state(3, 0)}), std::invalid_argument);
}

TEST_CASE("single ontic point cannot split conflicting targets") {
    const FeasibilityProblem p({zero, one}, {zero}, 1);
    const RMatrix half = RMatrix::Constant(1, 1, 0.5);
    // With P fixed to any value, the two columns cannot both be matched.
    const auto c0 = solve_rho(p, RMatrix::Constant(1, 1, 1.0), 0);
    const auto c1 = solve_rho(p, RMatrix::Constant(1, 1, 1.0), 1);
    CHECK(c0.feasible());
    CHECK_FALSE(c1.feasible());
    CHECK(verify_certificate(c1.program, c1.outcome.certificate));
    CHECK_FALSE(solve_rho(p, half, 0).feasible());

    const auto single = solve_single_point(FeasibilityProblem({zero, one, plus}, {zero}, 1));
    REQUIRE_FALSE(single.feasible());
    CHECK(verify_certificate(single.program, single.outcome.certificate));
}

TEST_CASE("delta responses make rho an indicator") {
    std::vector<PureState> s{random_pure_state(3, 1), random_pure_state(3, 2), random_pure_state(3, 3)};
    std::vector<PureState> e;
    for (std::uint64_t i = 0; i < 9; ++i) e.push_back(random_pure_state(3, 50 + i));
    const FeasibilityProblem p(s, e, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto r = solve_rho(p, p.targets, i);
        REQUIRE(r.feasible());
        for (Eigen::Index k = 0; k < 3; ++k) CHECK(std::abs(r.block(k) - (k == static_cast<Eigen::Index>(i))) < 1e-8);
    }
}

TEST_CASE("indicator weights force P = T") {
    std::vector<PureState> s{random_pure_state(2, 4), random_pure_state(2, 5)};
    std::vector<PureState> e{random_pure_state(2, 6), random_pure_state(2, 7), zero};
    const FeasibilityProblem p(s, e, 2);
    const auto r = solve_responses(p, RMatrix::Identity(2, 2));
    REQUIRE(r.feasible());
    CHECK((r.block - p.targets).cwiseAbs().maxCoeff() < 1e-8);

    // Identical mixtures give identical predictions.
    const FeasibilityProblem q({zero, one}, {zero}, 2);
    const auto bad = solve_responses(q, RMatrix::Constant(2, 2, 0.5));
    REQUIRE_FALSE(bad.feasible());
    CHECK(verify_certificate(bad.program, bad.outcome.certificate));
}

TEST_CASE("forward instances are feasible with either block frozen") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = forward_instance(3, 3, 6, 4, seed);
        check_valid_pair(inst.problem, inst.weights, inst.responses);
        CHECK(reproduction_residual(inst.problem, inst.weights, inst.responses) < 1e-12);
        const auto resp = solve_responses(inst.problem, inst.weights);
        REQUIRE(resp.feasible());
        CHECK(reproduction_residual(inst.problem, inst.weights, resp.block) < 1e-8);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto col = solve_rho(inst.problem, inst.responses, i);
            REQUIRE(col.feasible());
            CHECK((inst.responses * col.block - inst.problem.targets.col(static_cast<Eigen::Index>(i)))
                      .cwiseAbs()
                      .maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("alternation: delta start and analytic minimax") {
    std::vector<PureState> s{random_pure_state(3, 1), random_pure_state(3, 2), random_pure_state(3, 3)};
    const FeasibilityProblem p(s, s, 3);
    const auto rep = alternate_search(p, 3, 20, 1);
    CHECK(rep.traces[0][0] < 1e-12);
    CHECK(rep.best_residual < 1e-12);
    CHECK(rep.best_restart == 0);

    const FeasibilityProblem k1({zero, one}, {zero}, 1);
    const auto r1 = alternate_search(k1, 5, 50, 3);
    CHECK(std::abs(r1.best_residual - 0.5) < 1e-9);
    CHECK(std::abs(r1.best_responses(0, 0) - 0.5) < 1e-9);
}

TEST_CASE("alternation traces are nonincreasing and deterministic") {
    const auto inst = forward_instance(3, 4, 6, 5, 77);
    AlternationOptions o;
    o.restarts = 6;
    o.max_iters = 40;
    o.seed = 11;
    const auto a = alternate_search(inst.problem, o);
    for (const auto& t : a.traces) {
        for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] <= t[i - 1]);
    }
    check_valid_pair(inst.problem, a.best_weights, a.best_responses);
    CHECK(std::abs(reproduction_residual(inst.problem, a.best_weights, a.best_responses) - a.best_residual) < 1e-15);

    const auto b = alternate_search(inst.problem, o);
    CHECK(a.restart_best == b.restart_best);
    o.exec = Exec::serial;
    const auto c = alternate_search(inst.problem, o);
    CHECK(a.restart_best == c.restart_best);
    CHECK(a.best_restart == c.best_restart);
}

TEST_CASE("best restart is the lowest residual, ties to the lowest index") {
    const FeasibilityProblem k1({zero, one}, {zero}, 1);
    const auto r = alternate_search(k1, 4, 50, 9);
    double lo = r.restart_best[0];
    for (double v : r.restart_best) lo = std::min(lo, v);
    std::size_t first = 0;
    while (r.restart_best[first] != lo) ++first;
    CHECK(r.best_restart == first);
    CHECK_THROWS_AS(alternate_search(k1, 0, 10, 1), std::invalid_argument);
}

TEST_CASE("MUB states are mutually unbiased") {
    const auto m = mub_states(3);
    REQUIRE(m.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 9; ++j) {
            const double p = born_probability(m[i], m[j]);
            const double expected = i == j ? 1.0 : (i / 3 == j / 3 ? 0.0 : 1.0 / 3);
            CHECK(std::abs(p - expected) < 1e-12);
        }
    }
    CHECK(mub_states(5, 6).size() == 30);
}

TEST_CASE("MUB-9 with one ontic point is certified infeasible, with nine it is feasible") {
    const auto m = mub_states(3);
    const auto single = solve_single_point(FeasibilityProblem(m, m, 1));
    REQUIRE_FALSE(single.feasible());
    CHECK(verify_certificate(single.program, single.outcome.certificate));
    const auto rep = alternate_search(FeasibilityProblem(m, m, 9), 1, 5, 1);
    CHECK(rep.best_residual < 1e-9);
}
