#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "opkern/spectral.hpp"

namespace opkern {

/// ‖K(x,y)‖ ≤ C e^{−α|x−y|} (and the same for ∂ₓK, ∂_yK) beyond radius R;
/// δ is the compactification parameter.
struct TransformParams {
    double alpha = 1.0;
    double c_decay = 1.0;
    double delta = 1.0 / 6.0;
    double R = 0.0;
};

struct WindowAlpha {
    double lag_lo = 0.0;
    double lag_hi = 0.0;
    double alpha = 0.0;
};

struct DecayReport {
    TransformParams params;
    double fit_residual = 0.0;
    int pairs_used = 0;
    std::vector<WindowAlpha> windows;
    bool super_exponential = false;
    /// max over sampled pairs of max(‖∂ₓK‖, ‖∂_yK‖) e^{α|x−y|}, central
    /// differences with step 1e−5.
    double derivative_c = 0.0;
    /// Lipschitz estimate on |x|, |y| ≤ R.
    double local_lipschitz = 0.0;
};

/// Least-squares fit of ln‖K(x,y)‖_F against |x−y| on a samples × samples
/// grid over [−probe_radius, probe_radius]².
DecayReport estimate_decay(const KernelSpec& spec, double probe_radius = 10.0, int samples = 41);

/// α/6.
double choose_delta(double alpha);

double phi(double y, double delta);
double phi_inv(double x, double delta);
double phi_prime(double y, double delta);

/// K̃(y,y') = φ'(y)^{1/2} K(φ(y), φ(y')) φ'(y')^{1/2} on [−1, 1], zero on the
/// boundary.
KernelSpec transform_kernel(const KernelSpec& spec, const TransformParams& params);

struct BoundaryRow {
    double eps = 0.0;
    double sup_norm = 0.0;  // sup over the y' grid of ‖K̃(±(1−ε), y')‖_F
};

/// Boundary-vanishing table for a transformed kernel. An empty grid means
/// 64 Gauss-Legendre nodes on (−1, 1).
std::vector<BoundaryRow> boundary_table(const KernelSpec& transformed, std::span<const double> eps,
                                        std::span<const double> grid = {});

struct TransformOptions {
    double tol = 1e-5;
    int k_track = 5;
    int n0 = 32;
    int n_max = 1024;
    double probe_radius = 10.0;
    int samples = 41;
    std::optional<double> delta;  // defaults to choose_delta(alpha)
};

struct TransformResult {
    SpectralData spectrum;
    DecayReport decay;  // params.alpha = 1 with no fit when the kernel vanishes
    bool zero_kernel = false;
    std::vector<RefinementStep> history;
};

/// estimate_decay → choose_delta → transform_kernel → refine_until → decompose.
TransformResult spectrum_via_transform(const KernelSpec& spec, const TransformOptions& opts = {});

/// Σ_i w_i |f(φ(y_i))|² φ'(y_i) on an n-point Gauss-Legendre rule: the
/// discrete ‖𝒰f‖² on (−1, 1).
double transformed_norm_sq(const std::function<double(double)>& f, double delta, int n);

}  // namespace opkern
