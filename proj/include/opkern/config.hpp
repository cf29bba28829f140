#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "opkern/kernel.hpp"

namespace opkern {

/// Domain from {"kind": "interval"|"box"|"real_line", "bounds": [[a, b], ...]}.
Domain parse_domain(const nlohmann::json& j);

/// Kernel spec from a configuration tree:
///   name, type (gallery id or "grid"), domain, matrix_dim, params,
///   grid_file, grid_points.
/// Relative grid_file paths resolve against `base_dir`.
KernelSpec load_kernel(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Raw samples from a grid file: little-endian float64 for `.bin`, otherwise
/// comma/whitespace separated text. Row-major over (xi, yi, row, col).
std::vector<double> read_grid_samples(const std::filesystem::path& path, std::size_t expected);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace opkern
