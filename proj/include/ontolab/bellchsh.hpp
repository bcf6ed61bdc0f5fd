#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "ontolab/kernels.hpp"
#include "ontolab/qcore.hpp"

namespace ontolab {

/// Directions a, a' (first qubit) and b, b' (second qubit).
struct ChshSetting {
    BlochVector a, a2, b, b2;

    /// Rejects any direction off the unit sphere (1e-12).
    void validate() const;
};

/// Polar/azimuth pairs for a, a', b, b' in that order.
struct ChshAngles {
    std::array<double, 8> values{};
    ChshSetting setting() const;
};

/// T_mn = <psi| sigma_m (x) sigma_n |psi>, first qubit as the left factor.
using CorrelationTensor = Eigen::Matrix3d;

CorrelationTensor correlation_tensor(const PureState& two_qubit);

/// <ab> + <ab'> + <a'b> - <a'b'> with <ab> = a^T T b.
double chsh_value(const CorrelationTensor& corr, const ChshSetting& setting);
double chsh_value(const PureState& two_qubit, const ChshSetting& setting);

struct ChshSearchResult {
    double value = 0.0;
    ChshAngles angles;
    double grid_value = 0.0; // best value before refinement
};

/// Coarse grid over the spherical angles of all four directions (polar
/// angles on coarse_steps points of [0, pi], azimuths on coarse_steps
/// points of [0, 2 pi) shifted by a seed-derived offset), then golden-section
/// refinement of one angle at a time, round-robin, 4 * refine_iters passes.
ChshSearchResult chsh_grid_max(const PureState& two_qubit, std::size_t coarse_steps, std::size_t refine_iters,
                               std::uint64_t seed, Exec exec = Exec::parallel);

/// Closed-form maximum over all settings: 2 sqrt(u1 + u2) with u1, u2 the two
/// largest eigenvalues of T^T T.
double horodecki_max(const PureState& two_qubit);

/// |phi+>, |phi->, |psi+>, |psi-> in the computational basis.
std::array<PureState, 4> bell_states();

/// Reference setting reaching 2 sqrt 2 on |phi+>: a = z, a' = x,
/// b = (x + z)/sqrt 2, b' = (z - x)/sqrt 2.
ChshSetting standard_chsh_setting();

} // namespace ontolab
