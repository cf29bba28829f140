#include "opkern/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "opkern/errors.hpp"

namespace opkern::report {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string spectrum_csv(const SpectralData& sd) {
    std::string out = "index,mu,re,im\n";
    for (std::size_t l = 0; l < sd.singular_values.size(); ++l) {
        const cplx lam = l < sd.eigenvalues.size() ? sd.eigenvalues[l] : cplx(0.0);
        out += std::to_string(l + 1) + ',' + fmt(sd.singular_values[l]) + ',' + fmt(lam.real()) + ',' +
               fmt(lam.imag()) + '\n';
    }
    return out;
}

std::string series_csv(const DeterminantSeries& series) {
    std::string out = "n,re,im\n";
    for (std::size_t n = 0; n < series.coeffs.size(); ++n) {
        out += std::to_string(n) + ',' + fmt(series.coeffs[n].real()) + ',' + fmt(series.coeffs[n].imag()) + '\n';
    }
    return out;
}

void OutputSet::add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
}

void OutputSet::add_json(std::string name, const nlohmann::json& j) { add(std::move(name), j.dump(2) + "\n"); }

void OutputSet::write_all(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files_) {
        const auto path = dir / name;
        const auto tmp = dir / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw ArgumentError("cannot write " + tmp.string());
            out << content;
        }
        std::filesystem::rename(tmp, path);
    }
}

}  // namespace opkern::report
