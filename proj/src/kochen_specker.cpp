#include "ontolab/kochen_specker.hpp"

#include <cmath>
#include <stdexcept>

namespace ontolab {

RaySetReport validate_ray_set(const RaySet& rs) {
    RaySetReport rep;
    auto flag = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

    for (std::size_t r = 0; r < rs.rays.size(); ++r) {
        if (static_cast<std::size_t>(rs.rays[r].size()) != rs.dim) {
            flag("ray " + std::to_string(r) + " has length " + std::to_string(rs.rays[r].size()));
            continue;
        }
        const double norm = rs.rays[r].norm();
        if (std::abs(norm - 1.0) > 1e-9) flag("ray " + std::to_string(r) + " has norm " + std::to_string(norm));
    }

    std::vector<bool> used(rs.rays.size(), false);
    for (std::size_t b = 0; b < rs.bases.size(); ++b) {
        const auto& group = rs.bases[b];
        const std::string name = "basis " + std::to_string(b);
        if (group.size() != rs.dim) flag(name + " has " + std::to_string(group.size()) + " rays, expected " + std::to_string(rs.dim));
        bool indices_ok = true;
        for (std::size_t a = 0; a < group.size(); ++a) {
            if (group[a] >= rs.rays.size() || static_cast<std::size_t>(rs.rays[group[a]].size()) != rs.dim) {
                flag(name + " references invalid ray " + std::to_string(group[a]));
                indices_ok = false;
                continue;
            }
            used[group[a]] = true;
            for (std::size_t c = 0; c < a; ++c) {
                if (group[c] == group[a]) {
                    flag(name + " repeats ray " + std::to_string(group[a]));
                    indices_ok = false;
                }
            }
        }
        if (!indices_ok) continue;
        for (std::size_t a = 0; a < group.size(); ++a) {
            for (std::size_t c = a + 1; c < group.size(); ++c) {
                const double overlap = std::abs(rs.rays[group[a]].dot(rs.rays[group[c]]));
                if (overlap > 1e-9) {
                    flag(name + ": rays " + std::to_string(group[a]) + " and " + std::to_string(group[c]) +
                         " are not orthogonal (|<a|b>| = " + std::to_string(overlap) + ")");
                }
            }
        }
    }
    for (std::size_t r = 0; r < used.size(); ++r) {
        if (!used[r]) flag("ray " + std::to_string(r) + " belongs to no basis");
    }
    return rep;
}

namespace {

class AssignmentSearch {
public:
    explicit AssignmentSearch(const RaySet& rs) : value_(rs.rays.size(), 0) {
        member_of_.resize(rs.rays.size());
        for (std::size_t b = 0; b < rs.bases.size(); ++b) {
            for (std::size_t r : rs.bases[b]) member_of_[r].push_back(b);
        }
        ones_.assign(rs.bases.size(), 0);
        open_.resize(rs.bases.size());
        for (std::size_t b = 0; b < rs.bases.size(); ++b) open_[b] = rs.bases[b].size();
    }

    AssignmentCount run() {
        descend(0);
        if (result_.count > kMaxListedAssignments) result_.assignments.reset();
        return result_;
    }

private:
    // Feasible iff no basis has two ones, and a basis with no open rays left
    // has exactly one.
    bool consistent(std::size_t ray) const {
        for (std::size_t b : member_of_[ray]) {
            if (ones_[b] > 1) return false;
            if (open_[b] == 0 && ones_[b] != 1) return false;
        }
        return true;
    }

    void descend(std::size_t ray) {
        if (ray == value_.size()) {
            ++result_.count;
            if (result_.count <= kMaxListedAssignments) {
                if (!result_.assignments) result_.assignments.emplace();
                result_.assignments->push_back(value_);
            }
            return;
        }
        for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
            value_[ray] = v;
            for (std::size_t b : member_of_[ray]) {
                --open_[b];
                ones_[b] += v;
            }
            if (consistent(ray)) descend(ray + 1);
            for (std::size_t b : member_of_[ray]) {
                ++open_[b];
                ones_[b] -= v;
            }
        }
        value_[ray] = 0;
    }

    std::vector<std::uint8_t> value_;
    std::vector<std::vector<std::size_t>> member_of_;
    std::vector<std::size_t> ones_;
    std::vector<std::size_t> open_;
    AssignmentCount result_;
};

} // namespace

AssignmentCount ks_assignment_count(const RaySet& rs) {
    const auto rep = validate_ray_set(rs);
    if (!rep.ok()) throw std::invalid_argument("invalid ray set: " + rep.violations.front());
    AssignmentCount out = AssignmentSearch(rs).run();
    if (out.count == 0) out.assignments.emplace();
    return out;
}

} // namespace ontolab
