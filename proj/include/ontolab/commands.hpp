#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ontolab {

/// Command-line overrides; unset fields fall back to the document's
/// "options" object and then to the command defaults.
struct RunFlags {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::size_t> ontic_size;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> lattice;
    std::optional<std::string> out; // CSV (or model export) path
};

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitUsage = 2 };

struct RunResult {
    int exit_code = kExitPass;
    std::string report; // JSON, newline-terminated
};

const std::vector<std::string>& command_names();

/// Runs one command on a document. Never throws: document errors map to
/// exit code 2, failed checks and numerical failures to 1.
RunResult run(const std::string& command, std::string_view document, const RunFlags& flags);

/// FNV-1a 64-bit digest, 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);

} // namespace ontolab
