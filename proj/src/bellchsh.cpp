#include "ontolab/bellchsh.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace ontolab {

namespace {

Eigen::Vector3d vec(const BlochVector& v) { return {v.x(), v.y(), v.z()}; }

std::array<CMatrix, 3> paulis() {
    const Complex i(0.0, 1.0);
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    return {x, y, z};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace

void ChshSetting::validate() const {
    for (const auto* v : {&a, &a2, &b, &b2}) {
        if (std::abs(v->norm() - 1.0) > 1e-12) throw std::invalid_argument("CHSH setting directions must be unit vectors");
    }
}

ChshSetting ChshAngles::setting() const {
    const auto& v = values;
    return {BlochVector::from_angles(v[0], v[1]), BlochVector::from_angles(v[2], v[3]),
            BlochVector::from_angles(v[4], v[5]), BlochVector::from_angles(v[6], v[7])};
}

CorrelationTensor correlation_tensor(const PureState& psi) {
    if (psi.dim() != 4) throw std::invalid_argument("correlation_tensor: two-qubit state (dim 4) required");
    const auto s = paulis();
    CorrelationTensor t;
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            t(m, n) = psi.amplitudes().dot(kron(s[m], s[n]) * psi.amplitudes()).real();
        }
    }
    return t;
}

double chsh_value(const CorrelationTensor& t, const ChshSetting& st) {
    st.validate();
    const Eigen::Vector3d a = vec(st.a), a2 = vec(st.a2), b = vec(st.b), b2 = vec(st.b2);
    return a.dot(t * b) + a.dot(t * b2) + a2.dot(t * b) - a2.dot(t * b2);
}

double chsh_value(const PureState& psi, const ChshSetting& setting) {
    return chsh_value(correlation_tensor(psi), setting);
}

double horodecki_max(const PureState& psi) {
    const CorrelationTensor t = correlation_tensor(psi);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t, Eigen::EigenvaluesOnly);
    const auto& u = es.eigenvalues(); // ascending
    return 2.0 * std::sqrt(std::max(0.0, u(1) + u(2)));
}

std::array<PureState, 4> bell_states() {
    const double r = 1.0 / std::sqrt(2.0);
    return {PureState({r, 0.0, 0.0, r}), PureState({r, 0.0, 0.0, -r}), PureState({0.0, r, r, 0.0}),
            PureState({0.0, r, -r, 0.0})};
}

ChshSetting standard_chsh_setting() {
    const double r = 1.0 / std::sqrt(2.0);
    return {BlochVector{{0, 0, 1}}, BlochVector{{1, 0, 0}}, BlochVector{{r, 0, r}}, BlochVector{{-r, 0, r}}};
}

ChshSearchResult chsh_grid_max(const PureState& psi, std::size_t coarse_steps, std::size_t refine_iters,
                               std::uint64_t seed, Exec exec) {
    if (coarse_steps < 8) throw std::invalid_argument("chsh_grid_max: coarse_steps must be >= 8");
    const CorrelationTensor t = correlation_tensor(psi);
    const double pi = std::numbers::pi;

    auto rng = seeded_engine(seed);
    const double azimuth_offset = std::uniform_real_distribution<double>(0.0, 2.0 * pi / static_cast<double>(coarse_steps))(rng);

    std::vector<std::array<double, 2>> grid_angles;
    std::vector<BlochVector> grid;
    for (std::size_t i = 0; i < coarse_steps; ++i) {
        const double theta = pi * static_cast<double>(i) / static_cast<double>(coarse_steps - 1);
        for (std::size_t j = 0; j < coarse_steps; ++j) {
            const double phi = azimuth_offset + 2.0 * pi * static_cast<double>(j) / static_cast<double>(coarse_steps);
            grid_angles.push_back({theta, phi});
            grid.push_back(BlochVector::from_angles(theta, phi));
        }
    }
    const kernels::GridBest best =
        exec == Exec::serial ? kernels::serial::chsh_grid(t, grid) : kernels::parallel::chsh_grid(t, grid);

    ChshSearchResult out;
    for (std::size_t v = 0; v < 4; ++v) {
        const std::size_t g = std::array{best.a, best.a2, best.b, best.b2}[v];
        out.angles.values[2 * v] = grid_angles[g][0];
        out.angles.values[2 * v + 1] = grid_angles[g][1];
    }
    auto eval = [&](const ChshAngles& ang) { return chsh_value(t, ang.setting()); };
    out.value = out.grid_value = eval(out.angles);

    // Golden-section refinement, one angle at a time, bracket shrinking
    // after every round.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double half_width = pi / static_cast<double>(coarse_steps - 1);
    for (std::size_t pass = 0; pass < 4 * refine_iters; ++pass) {
        for (std::size_t k = 0; k < 8; ++k) {
            ChshAngles trial = out.angles;
            auto f = [&](double x) {
                trial.values[k] = x;
                return eval(trial);
            };
            double lo = out.angles.values[k] - half_width, hi = out.angles.values[k] + half_width;
            double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
            double f1 = f(x1), f2 = f(x2);
            for (int it = 0; it < 60; ++it) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = f(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = f(x1);
                }
            }
            const double x = 0.5 * (lo + hi);
            const double fx = f(x);
            if (fx > out.value) {
                out.value = fx;
                out.angles.values[k] = x;
            }
        }
        half_width = std::max(half_width * 0.7, 1e-6);
    }
    return out;
}

} // namespace ontolab
