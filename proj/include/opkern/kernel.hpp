#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opkern/linalg.hpp"

namespace opkern {

/// A point of X ⊂ R^m with m ≤ 2; unused trailing coordinates are zero.
using Point = std::array<double, 2>;

inline Point at(double x) { return {x, 0.0}; }
inline Point at(double x0, double x1) { return {x0, x1}; }

struct Domain {
    enum class Kind { Box, RealLine };

    Kind kind = Kind::Box;
    int dim = 1;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 0.0};

    static Domain interval(double a, double b);
    static Domain box(double a0, double b0, double a1, double b1);
    static Domain real_line();

    bool compact() const { return kind == Kind::Box; }
    bool contains(const Point& p, double slack = 1e-12) const;
    double volume() const;
    double diameter() const;
    bool same_as(const Domain& other, double tol = 1e-12) const;
    std::string describe() const;
};

/// Facts about a gallery kernel that tests compare against. Never consulted by
/// the numerical routines.
struct KernelMetadata {
    bool hermitian = false;
    bool psd = false;
    std::optional<double> holder_exponent;
    std::optional<double> decay_rate;
    /// Closed-form singular values, descending; a generator so infinite
    /// sequences can be sampled lazily.
    std::function<double(int)> exact_singular_value;
};

/// Writes K(x, y) into `out` (pre-sized d×d, zeroed). Must be pure.
using KernelFn = std::function<void(const Point& x, const Point& y, MatrixRef out)>;

struct KernelSpec {
    std::string id;
    Domain domain;
    int matrix_dim = 1;
    KernelFn evaluator;
    KernelMetadata meta;
};

/// K(x, y) with domain and finiteness checks.
CMatrix eval_kernel(const KernelSpec& spec, const Point& x, const Point& y);

/// Same as eval_kernel but without the domain check; for hot loops over
/// nodes already known to lie in the domain.
void eval_unchecked(const KernelSpec& spec, const Point& x, const Point& y, MatrixRef out);

/// `n_per_axis` equispaced points covering a compact domain.
std::vector<Point> uniform_grid(const Domain& domain, int n_per_axis);

struct RegularityReport {
    double gamma_hat = 0.0;
    double c_hat = 0.0;
    double residual = 0.0;
    bool pass_half = false;
    std::vector<double> lags;
    std::vector<double> sup_modulus;
};

/// Hölder modulus estimate: sup over grid pairs of ‖K(p + h e) − K(p)‖_F for
/// coordinate displacements e, then a log-log least-squares slope.
RegularityReport holder_modulus(const KernelSpec& spec, std::span<const Point> grid,
                                std::span<const double> lags);

/// Average of K over the clipped product of cubes B_r(x) × B_r(y).
CMatrix local_average(const KernelSpec& spec, double r, const Point& x, const Point& y,
                      int quad_pts);

/// Discrete maximal function: max over `radii` of the averaged Schatten-p norm.
double maximal_function(const KernelSpec& spec, std::span<const double> radii, const Point& x,
                        const Point& y, int p, int quad_pts = 64);

struct HermitianSplit {
    KernelSpec hermitian;       // ½(K(x,y) + K(y,x)*)
    KernelSpec skew_hermitian;  // (i/2)(K(x,y) − K(y,x)*)
};

/// K = H − i S̃ with both parts Hermitian kernels.
HermitianSplit hermitian_split(const KernelSpec& spec);

/// Kernel sampled on a uniform 1-D grid of `points` nodes over the domain,
/// interpolated bilinearly. `samples` is row-major over (xi, yi, row, col).
KernelSpec grid_kernel(std::string id, const Domain& domain, int points, int matrix_dim,
                       std::vector<double> samples);

/// The same evaluator viewed on a compact sub-interval (used to truncate
/// real-line kernels).
KernelSpec restrict_to(const KernelSpec& spec, const Domain& domain);

}  // namespace opkern
