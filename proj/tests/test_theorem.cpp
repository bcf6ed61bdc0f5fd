#include <doctest.h>

#include <cmath>

#include "ontolab/onto.hpp"

using namespace ontolab;

namespace {

std::vector<Projector> projectors(const std::vector<PureState>& states) {
    std::vector<Projector> out;
    for (const auto& s : states) out.emplace_back(s);
    return out;
}

// B0 = U diag(lambda) U^H with lambda in [0,1] and U from a QR of a seeded
// complex Gaussian matrix.
CMatrix random_effect_operator(std::size_t d, std::uint64_t seed) {
    auto rng = seeded_engine(seed, 3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CMatrix z(d, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(g(rng), g(rng));
    const CMatrix q = z.householderQr().householderQ();
    Eigen::VectorXd lam(d);
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = u(rng);
    return q * lam.cast<Complex>().asDiagonal() * q.adjoint();
}

std::vector<double> traced(const CMatrix& b, const std::vector<PureState>& effects) {
    std::vector<double> r;
    for (const auto& e : effects) r.push_back(e.amplitudes().dot(b * e.amplitudes()).real());
    return r;
}

} // namespace

TEST_CASE("IC effect set spans the Hermitian operators") {
    for (std::size_t d : {2u, 3u, 4u}) {
        const auto ic = ic_effect_set(d);
        CHECK(ic.size() == d * d);
        const HermitianDesign design(projectors(ic), d);
        CHECK(design.rank() == d * d);
    }
}

TEST_CASE("rank-deficient effect sets are rejected with their rank") {
    std::vector<PureState> basis;
    for (std::size_t i = 0; i < 3; ++i) basis.push_back(basis_state(3, i));
    try {
        reconstruct_ontic_operator(projectors(basis), std::vector<double>{1, 0, 0}, 3);
        FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
        CHECK(e.rank() == 3);
    }
}

TEST_CASE("reconstruction of Born responses and constants") {
    const auto ic = ic_effect_set(3);
    const PureState chi = random_pure_state(3, 12);
    std::vector<double> born;
    for (const auto& e : ic) born.push_back(born_probability(chi, e));
    const auto rec = reconstruct_ontic_operator(projectors(ic), born, 3);
    CHECK((rec.op.matrix() - Projector(chi).matrix()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_FALSE(rec.inconsistent);

    const std::vector<double> constant(ic.size(), 0.37);
    const auto c = reconstruct_ontic_operator(projectors(ic), constant, 3);
    CHECK((c.op.matrix() - 0.37 * CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("random effect operators round trip") {
    const auto ic = ic_effect_set(3);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const CMatrix b0 = random_effect_operator(3, s);
        const auto rec = reconstruct_ontic_operator(projectors(ic), traced(b0, ic), 3);
        CHECK((rec.op.matrix() - b0).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("overcomplete random effect sets work too and flag inconsistency") {
    std::vector<PureState> effects;
    for (std::uint64_t s = 0; s < 16; ++s) effects.push_back(random_pure_state(3, 900 + s));
    const CMatrix b0 = random_effect_operator(3, 4);
    auto r = traced(b0, effects);
    const auto ok = reconstruct_ontic_operator(projectors(effects), r, 3);
    CHECK((ok.op.matrix() - b0).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_FALSE(ok.inconsistent);
    r[0] += 0.05;
    const auto bad = reconstruct_ontic_operator(projectors(effects), r, 3);
    CHECK(bad.inconsistent);
    CHECK(bad.residual > 1e-8);
}

TEST_CASE("serial and parallel solves agree") {
    const auto ic = ic_effect_set(4);
    const HermitianDesign design(projectors(ic), 4);
    RMatrix rhs(static_cast<Eigen::Index>(ic.size()), 50);
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        const auto r = traced(random_effect_operator(4, 300 + c), ic);
        rhs.col(c) = Eigen::Map<const Eigen::VectorXd>(r.data(), rhs.rows());
    }
    CHECK((design.solve(rhs, Exec::serial) - design.solve(rhs, Exec::parallel)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("delta model satisfies the theorem structure") {
    std::vector<PureState> states;
    for (std::uint64_t s = 0; s < 6; ++s) states.push_back(random_pure_state(3, 40 + s));
    const OntoModel m = delta_model(states);
    const auto rep = theorem_structure_check(m, states, ic_effect_set(3), 1e-9);
    CHECK(rep.born_residual < 1e-9);
    CHECK(rep.reconstruction_residual < 1e-9);
    CHECK(rep.max_lambda_deviation() < 1e-9);
    CHECK(rep.max_proportionality_deviation() < 1e-9);
    CHECK(rep.max_lambda_mean_residual() < 1e-9);
    CHECK(rep.born_response_residual < 1e-9);
    CHECK(rep.operator_bound_violation < 1e-9);
    CHECK(rep.supports_disjoint);
    CHECK(rep.structure_holds());
    CHECK(rep.dimension_bound_holds());
    for (std::size_t k = 0; k < states.size(); ++k) {
        REQUIRE(rep.support_map[k]);
        CHECK(*rep.support_map[k] == k);
    }
}

TEST_CASE("repeated preparations map to one ray class") {
    const PureState a = random_pure_state(3, 1), b = random_pure_state(3, 2);
    const PureState a_phase(CVector(a.amplitudes() * Complex(-1.0, 0.0)));
    const auto rep = theorem_structure_check(delta_model({a, b}), {a, b, a_phase}, ic_effect_set(3), 1e-9);
    CHECK(rep.distinct_prepared == 2);
    CHECK(rep.supports_disjoint);
    REQUIRE(rep.support_map[0]);
    CHECK(*rep.support_map[0] == 0);
}

TEST_CASE("KS qubit model has overlapping supports") {
    const OntoModel ks = ks_model_qubit(5000);
    const PureState zero{1.0, 0.0}, plus{1.0, 1.0};
    const auto rep = theorem_structure_check(ks, {zero, plus}, ic_effect_set(2), 1e-9);
    CHECK_FALSE(rep.supports_disjoint);
    // Oracle: count lattice points inside both hemispheres.
    std::size_t both = 0;
    const BlochVector z{{0, 0, 1}}, x{{1, 0, 0}};
    for (const auto& l : ks.ontic().directions()) both += (z.dot(l) > 1e-12 && x.dot(l) > 1e-12);
    CHECK(rep.overlaps.size() == both);
    CHECK_FALSE(rep.structure_holds());
}

TEST_CASE("corrupted responses are detected") {
    std::vector<PureState> states{random_pure_state(3, 5), random_pure_state(3, 6), random_pure_state(3, 7)};
    const OntoModel clean = delta_model(states);
    OntoModel corrupted("corrupted", 3, clean.ontic(), [&](const PureState& p) { return clean.weights(p); },
                        [&](const PureState& phi) {
                            auto r = clean.response(phi);
                            r[0] = std::min(1.0, r[0] + 0.1);
                            return r;
                        });
    const auto rep = theorem_structure_check(corrupted, states, ic_effect_set(3), 1e-9);
    CHECK(rep.born_residual >= 0.05);
    CHECK_FALSE(rep.structure_holds());
}

TEST_CASE("dimension bound holds whenever the structure holds") {
    // Property: over random delta models of varying size, a passing check
    // always has K >= number of distinct prepared states.
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto rng = seeded_engine(seed, 1);
        const std::size_t d = 2 + seed % 3;
        const std::size_t n = 1 + rng() % 6;
        std::vector<PureState> states;
        for (std::size_t i = 0; i < n; ++i) states.push_back(random_pure_state(d, rng));
        const auto rep = theorem_structure_check(delta_model(states), states, ic_effect_set(d), 1e-9);
        if (rep.structure_holds()) CHECK(rep.ontic_size >= rep.distinct_prepared);
        CHECK(rep.dimension_bound_holds());
    }
}
