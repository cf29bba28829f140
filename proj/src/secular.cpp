#include <algorithm>
#include <cmath>
#include <functional>

#include "opkern/errors.hpp"
#include "opkern/spectral.hpp"

namespace opkern {

namespace {

struct Pole {
    double nu;
    double c;  // ‖v_k‖²
};

// f(μ) = 1 + Σ c_k / (ν_k − μ); strictly increasing between consecutive poles.
double secular(const std::vector<Pole>& poles, double mu) {
    double f = 1.0;
    for (const auto& p : poles) f += p.c / (p.nu - mu);
    return f;
}

// Bisection on (lo, hi) where f(lo+) < 0 < f(hi−); runs until the bracket
// cannot shrink further in floating point.
double bisect(const std::vector<Pole>& poles, double lo, double hi, bool hi_closed) {
    if (hi_closed && secular(poles, hi) <= 0.0) {
        if (secular(poles, hi) == 0.0) return hi;
        throw NumericError("secular_rank_one_update: failed to bracket the top root");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = secular(poles, mid);
        if (f == 0.0) return mid;
        (f < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> secular_rank_one_update(std::span<const double> eigs, std::span<const int> mults,
                                            std::span<const double> v_norms_sq) {
    if (eigs.size() != mults.size() || eigs.size() != v_norms_sq.size()) {
        throw ArgumentError("secular_rank_one_update: eigs, mults and v_norms_sq differ in length");
    }
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        if (!std::isfinite(eigs[k]) || !std::isfinite(v_norms_sq[k])) {
            throw ArgumentError("secular_rank_one_update: non-finite input");
        }
        if (k > 0 && !(eigs[k] < eigs[k - 1])) {
            throw ArgumentError("secular_rank_one_update: eigenvalues must be strictly descending");
        }
        if (mults[k] < 1) throw ArgumentError("secular_rank_one_update: multiplicities must be >= 1");
        if (v_norms_sq[k] < 0.0) throw ArgumentError("secular_rank_one_update: v_norms_sq must be >= 0");
    }

    std::vector<double> out;
    std::vector<Pole> poles;
    double mass = 0.0;
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        const int keep = v_norms_sq[k] > 0.0 ? mults[k] - 1 : mults[k];
        out.insert(out.end(), keep, eigs[k]);
        if (v_norms_sq[k] > 0.0) {
            poles.push_back({eigs[k], v_norms_sq[k]});
            mass += v_norms_sq[k];
        }
    }

    if (!poles.empty()) {
        out.push_back(bisect(poles, poles.front().nu, poles.front().nu + mass, true));
        for (std::size_t k = 0; k + 1 < poles.size(); ++k) {
            out.push_back(bisect(poles, poles[k + 1].nu, poles[k].nu, false));
        }
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace opkern
