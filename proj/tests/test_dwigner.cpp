#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ontolab/dwigner.hpp"

using namespace ontolab;

namespace {

HermitianOperator mixed(const CMatrix& a, const CMatrix& b, double alpha) {
    return HermitianOperator(alpha * a + (1 - alpha) * b);
}

} // namespace

TEST_CASE("odd prime check") {
    CHECK(is_odd_prime(3));
    CHECK(is_odd_prime(5));
    CHECK(is_odd_prime(31));
    CHECK_FALSE(is_odd_prime(2));
    CHECK_FALSE(is_odd_prime(9));
    CHECK_FALSE(is_odd_prime(1));
    CHECK_THROWS_AS(PhasePointSet(4), std::invalid_argument);
    CHECK_THROWS_WITH(PhasePointSet(9), doctest::Contains("odd prime required"));
}

TEST_CASE("phase-point operator invariants") {
    for (std::size_t d : {3u, 5u, 7u}) {
        const PhasePointSet pps(d);
        for (std::size_t a = 0; a < d * d; ++a) {
            const CMatrix& x = pps.at(a / d, a % d);
            CHECK((x - x.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(std::abs(x.trace() - Complex(1.0)) < 1e-12);
            for (std::size_t b = 0; b < d * d; ++b) {
                const Complex t = (x * pps.at(b / d, b % d)).trace();
                CHECK(std::abs(t - Complex(a == b ? static_cast<double>(d) : 0.0)) < 1e-10);
            }
        }
    }
    const PhasePointSet p3(3);
    CHECK(std::abs((p3.at(0, 0) * p3.at(1, 1)).trace()) < 1e-12);
}

TEST_CASE("phase-point entries follow the kernel") {
    const std::size_t d = 5;
    const PhasePointSet pps(d);
    const double w = 2 * std::numbers::pi / d;
    for (std::size_t q = 0; q < d; ++q) {
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t m = 0; m < d; ++m) {
                for (std::size_t n = 0; n < d; ++n) {
                    const Complex expect = (m + n) % d == (2 * q) % d
                                               ? std::polar(1.0, w * static_cast<double>(p) *
                                                                     (static_cast<double>(m) - static_cast<double>(n)))
                                               : Complex(0.0);
                    CHECK(std::abs(pps.at(q, p)(m, n) - expect) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("simple Wigner tables") {
    const PhasePointSet pps(3);
    const auto mm = wigner(HermitianOperator(CMatrix::Identity(3, 3) / 3.0), pps);
    CHECK((mm.values.array() - 1.0 / 9).abs().maxCoeff() < 1e-15);
    CHECK(negativity(mm) == 0.0);

    const auto z = wigner(basis_state(3, 0), pps);
    for (Eigen::Index q = 0; q < 3; ++q) {
        for (Eigen::Index p = 0; p < 3; ++p) CHECK(std::abs(z.values(q, p) - (q == 0 ? 1.0 / 3 : 0.0)) < 1e-15);
    }
    CHECK((z.position_marginal() - Eigen::Vector3d(1, 0, 0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(negativity(z) == 0.0);
    CHECK_THROWS_AS(wigner(HermitianOperator(CMatrix::Identity(3, 3)), pps), std::invalid_argument);
}

TEST_CASE("marginals, normalization and round trips on random states") {
    for (std::size_t d : {3u, 5u}) {
        const PhasePointSet pps(d);
        for (std::uint64_t s = 0; s < 100; ++s) {
            const PureState psi = random_pure_state(d, s);
            const auto t = wigner(psi, pps);
            CHECK(std::abs(t.sum() - 1.0) < 1e-10);
            CHECK(t.values.maxCoeff() <= 1.0 / d + 1e-9);
            CHECK(t.min() >= -1.0 / d - 1e-9);
            for (std::size_t k = 0; k < d; ++k) {
                CHECK(std::abs(t.position_marginal()(static_cast<Eigen::Index>(k)) - std::norm(psi[k])) < 1e-10);
                CHECK(std::abs(t.momentum_marginal()(static_cast<Eigen::Index>(k)) -
                               born_probability(fourier_state(d, k), psi)) < 1e-10);
            }
            const auto back = reconstruct_from_wigner(t, pps);
            CHECK((back.matrix() - Projector(psi).matrix()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("transform is linear") {
    const PhasePointSet pps(5);
    const CMatrix a = Projector(random_pure_state(5, 1)).matrix();
    const CMatrix b = Projector(random_pure_state(5, 2)).matrix();
    const double alpha = 0.35;
    const auto wa = wigner(HermitianOperator(a), pps), wb = wigner(HermitianOperator(b), pps);
    const auto wm = wigner(mixed(a, b, alpha), pps);
    CHECK((wm.values - (alpha * wa.values + (1 - alpha) * wb.values)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("negativity witnesses and shift invariance") {
    const PhasePointSet pps(3);
    double best = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) best = std::max(best, negativity(wigner(random_pure_state(3, s), pps)));
    CHECK(best > 0.01);

    // Shifting the state by X: |m> -> |m+1> moves q by one; negativity fixed.
    for (std::uint64_t s = 0; s < 20; ++s) {
        const PureState psi = random_pure_state(3, 200 + s);
        CVector shifted(3);
        for (Eigen::Index m = 0; m < 3; ++m) shifted((m + 1) % 3) = psi.amplitudes()(m);
        const auto t0 = wigner(psi, pps), t1 = wigner(PureState(shifted), pps);
        CHECK(std::abs(negativity(t0) - negativity(t1)) < 1e-12);
        for (Eigen::Index q = 0; q < 3; ++q) {
            for (Eigen::Index p = 0; p < 3; ++p) CHECK(std::abs(t1.values((q + 1) % 3, p) - t0.values(q, p)) < 1e-12);
        }
    }
}

TEST_CASE("serial and parallel tables agree") {
    const PhasePointSet pps(7);
    const PureState psi = random_pure_state(7, 8);
    const auto a = wigner(psi, pps, Exec::serial), b = wigner(psi, pps, Exec::parallel);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-14);
}
