#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ontolab/qcore.hpp"

namespace ontolab {

/// Rays in C^d grouped into orthonormal bases; a ray index shared by two
/// groups is the same ray in both. Rays are stored as given (not
/// normalized) so validation can flag bad data.
struct RaySet {
    std::size_t dim = 0;
    std::vector<CVector> rays;
    std::vector<std::vector<std::size_t>> bases;
};

struct RaySetReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Unit norm per ray (1e-9), every group of size d with distinct in-range
/// indices and pairwise orthogonal (1e-9), every ray used by some group.
RaySetReport validate_ray_set(const RaySet& rays);

inline constexpr std::uint64_t kMaxListedAssignments = 1000;

struct AssignmentCount {
    std::uint64_t count = 0;
    // 0/1 value per ray; filled when count <= 1000.
    std::optional<std::vector<std::vector<std::uint8_t>>> assignments;
};

/// Counts 0/1 valuations with exactly one 1 in every listed basis by
/// backtracking over rays in index order (0 before 1). Throws
/// std::invalid_argument when validation reports any violation.
AssignmentCount ks_assignment_count(const RaySet& rays);

} // namespace ontolab
