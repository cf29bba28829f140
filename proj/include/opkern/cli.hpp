#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opkern::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDiagnostic = 2;

/// Command-line settings before the config file is merged in.
struct RunConfig {
    std::string command;
    std::optional<std::filesystem::path> config_path;
    std::string gallery;
    std::map<std::string, double> params;
    std::filesystem::path out_dir = "opkern_out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> z_grid;
    std::optional<std::vector<int>> ranks;
    std::optional<int> bn_max;
};

/// "k=v" → (k, v); throws ArgumentError when malformed.
std::pair<std::string, double> parse_param(const std::string& kv);

/// "1,5,20,80".
std::vector<int> parse_ranks(const std::string& text);

/// Runs one command; returns the process exit code. Errors are reported on
/// `err` and yield kExitError with no files written.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace opkern::cli
