#include "opkern/config.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "opkern/errors.hpp"
#include "opkern/gallery.hpp"

namespace opkern {

Domain parse_domain(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "interval");
    if (kind == "real_line") return Domain::real_line();
    const auto& b = j.at("bounds");
    if (kind == "interval") {
        if (b.size() != 1) throw ArgumentError("interval domain needs one [a, b] pair");
        return Domain::interval(b[0].at(0).get<double>(), b[0].at(1).get<double>());
    }
    if (kind == "box") {
        if (b.size() != 2) throw ArgumentError("box domain needs two [a, b] pairs");
        return Domain::box(b[0].at(0).get<double>(), b[0].at(1).get<double>(),
                           b[1].at(0).get<double>(), b[1].at(1).get<double>());
    }
    throw ArgumentError("unknown domain kind '" + kind + "'");
}

std::vector<double> read_grid_samples(const std::filesystem::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open grid file " + path.string());
    std::vector<double> out;
    if (path.extension() == ".bin") {
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (bytes.size() != expected * sizeof(double)) {
            throw ArgumentError("grid file " + path.string() + " has " + std::to_string(bytes.size()) +
                                " bytes, expected " + std::to_string(expected * sizeof(double)));
        }
        out.resize(expected);
        for (std::size_t i = 0; i < expected; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, bytes.data() + i * sizeof(double), sizeof(bits));
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            std::memcpy(&out[i], &bits, sizeof(bits));
        }
        return out;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (char& c : text)
        if (c == ',' || c == ';') c = ' ';
    std::istringstream ss(text);
    double v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof()) throw ArgumentError("grid file " + path.string() + " contains non-numeric data");
    if (out.size() != expected) {
        throw ArgumentError("grid file " + path.string() + " has " + std::to_string(out.size()) +
                            " values, expected " + std::to_string(expected));
    }
    return out;
}

KernelSpec load_kernel(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    try {
        const std::string type = j.at("type").get<std::string>();
        std::optional<Domain> domain;
        if (j.contains("domain")) domain = parse_domain(j.at("domain"));
        std::map<std::string, double> params;
        if (j.contains("params")) {
            for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
        }
        const int d = j.value("matrix_dim", 0);
        if (d > 0 && !params.count("d")) params["d"] = d;

        KernelSpec spec;
        if (type == "grid") {
            if (!domain) throw ArgumentError("grid kernels need a domain");
            const int points = j.at("grid_points").get<int>();
            const int md = d > 0 ? d : 1;
            std::filesystem::path file = j.at("grid_file").get<std::string>();
            if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
            auto samples = read_grid_samples(
                file, static_cast<std::size_t>(points) * points * md * md);
            spec = grid_kernel(j.value("name", "grid"), *domain, points, md, std::move(samples));
        } else {
            spec = gallery::make(type, params, domain);
            if (j.contains("name")) spec.id = j.at("name").get<std::string>();
        }
        if (d > 0 && spec.matrix_dim != d) {
            throw ArgumentError("matrix_dim " + std::to_string(d) + " does not match kernel dimension " +
                                std::to_string(spec.matrix_dim));
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed kernel config: ") + e.what());
    }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError("cannot parse " + path.string() + ": " + e.what());
    }
}

}  // namespace opkern
