#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "opkern/determinant.hpp"
#include "opkern/spectral.hpp"

namespace opkern {

inline constexpr const char* kVersion = "0.1.0";

namespace report {

/// Shortest round-trip text for a double ("%.17g"); "inf"/"-inf"/"nan" when
/// not finite.
std::string fmt(double v);

/// JSON number, or the fmt() string for non-finite values.
nlohmann::json number(double v);

std::string fnv1a_hex(std::string_view bytes);

/// index,mu,re,im
std::string spectrum_csv(const SpectralData& sd);

/// n,re,im
std::string series_csv(const DeterminantSeries& series);

/// Collects output files in memory so a failing command writes nothing.
class OutputSet {
public:
    void add(std::string name, std::string content);
    void add_json(std::string name, const nlohmann::json& j);
    void write_all(const std::filesystem::path& dir) const;
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace report
}  // namespace opkern
