#include "opkern/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "opkern/errors.hpp"
#include "opkern/quadrature.hpp"

namespace opkern {

// ---------------------------------------------------------------- Domain

Domain Domain::interval(double a, double b) {
    if (!(a < b)) throw ArgumentError("interval requires a < b");
    Domain d;
    d.kind = Kind::Box;
    d.dim = 1;
    d.lower = {a, 0.0};
    d.upper = {b, 0.0};
    return d;
}

Domain Domain::box(double a0, double b0, double a1, double b1) {
    if (!(a0 < b0) || !(a1 < b1)) throw ArgumentError("box requires lower < upper on each axis");
    Domain d;
    d.kind = Kind::Box;
    d.dim = 2;
    d.lower = {a0, a1};
    d.upper = {b0, b1};
    return d;
}

Domain Domain::real_line() {
    Domain d;
    d.kind = Kind::RealLine;
    d.dim = 1;
    d.lower = {-std::numeric_limits<double>::infinity(), 0.0};
    d.upper = {std::numeric_limits<double>::infinity(), 0.0};
    return d;
}

bool Domain::contains(const Point& p, double slack) const {
    for (int k = 0; k < dim; ++k) {
        if (!std::isfinite(p[k])) return false;
        if (kind == Kind::RealLine) continue;
        const double tol = slack * std::max(1.0, upper[k] - lower[k]);
        if (p[k] < lower[k] - tol || p[k] > upper[k] + tol) return false;
    }
    return true;
}

double Domain::volume() const {
    if (!compact()) return std::numeric_limits<double>::infinity();
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= upper[k] - lower[k];
    return v;
}

double Domain::diameter() const {
    if (!compact()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += (upper[k] - lower[k]) * (upper[k] - lower[k]);
    return std::sqrt(s);
}

bool Domain::same_as(const Domain& other, double tol) const {
    if (kind != other.kind || dim != other.dim) return false;
    if (kind == Kind::RealLine) return true;
    for (int k = 0; k < dim; ++k) {
        if (std::abs(lower[k] - other.lower[k]) > tol || std::abs(upper[k] - other.upper[k]) > tol)
            return false;
    }
    return true;
}

std::string Domain::describe() const {
    if (kind == Kind::RealLine) return "real_line";
    std::ostringstream os;
    os << (dim == 1 ? "interval" : "box");
    for (int k = 0; k < dim; ++k) os << " [" << lower[k] << ", " << upper[k] << "]";
    return os.str();
}

// ------------------------------------------------------------ evaluation

void eval_unchecked(const KernelSpec& spec, const Point& x, const Point& y, MatrixRef out) {
    out.setZero();
    try {
        spec.evaluator(x, y, out);
    } catch (const DomainError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError("kernel '" + spec.id + "' evaluation failed: " + e.what());
    }
}

CMatrix eval_kernel(const KernelSpec& spec, const Point& x, const Point& y) {
    if (!spec.domain.contains(x) || !spec.domain.contains(y)) {
        throw DomainError("kernel '" + spec.id + "': point outside " + spec.domain.describe());
    }
    if (!spec.evaluator) throw EvaluationError("kernel '" + spec.id + "' has no evaluator");
    CMatrix out(spec.matrix_dim, spec.matrix_dim);
    eval_unchecked(spec, x, y, out);
    if (!linalg::all_finite(out)) {
        throw EvaluationError("kernel '" + spec.id + "' produced non-finite entries");
    }
    return out;
}

std::vector<Point> uniform_grid(const Domain& domain, int n_per_axis) {
    if (!domain.compact()) throw DomainError("uniform_grid needs a compact domain");
    if (n_per_axis < 2) throw ArgumentError("uniform_grid needs at least 2 points per axis");
    std::vector<double> axis[2];
    for (int k = 0; k < domain.dim; ++k) {
        const double h = (domain.upper[k] - domain.lower[k]) / (n_per_axis - 1);
        for (int i = 0; i < n_per_axis; ++i) axis[k].push_back(domain.lower[k] + h * i);
        axis[k].back() = domain.upper[k];
    }
    std::vector<Point> grid;
    if (domain.dim == 1) {
        for (double v : axis[0]) grid.push_back(at(v));
    } else {
        for (double u : axis[0])
            for (double v : axis[1]) grid.push_back(at(u, v));
    }
    return grid;
}

// ------------------------------------------------------------ regularity

RegularityReport holder_modulus(const KernelSpec& spec, std::span<const Point> grid,
                                std::span<const double> lags) {
    const int m = spec.domain.dim;
    const std::size_t min_nodes = m == 1 ? 8 : 64;
    if (grid.size() < min_nodes) throw ArgumentError("holder_modulus: grid needs >= 8 nodes per axis");
    if (lags.empty()) throw ArgumentError("holder_modulus: no lags given");
    for (double h : lags) {
        if (!(h > 0.0) || h > spec.domain.diameter()) {
            throw ArgumentError("holder_modulus: lags must be positive and within the domain diameter");
        }
    }
    const auto [lo, hi] = std::minmax_element(lags.begin(), lags.end());
    if (*lo == *hi) throw EstimationError("holder_modulus: degenerate lag set (all lags equal)");

    const long npairs = static_cast<long>(grid.size() * grid.size());
    const int d = spec.matrix_dim;

    RegularityReport rep;
    rep.lags.assign(lags.begin(), lags.end());
    rep.sup_modulus.assign(lags.size(), 0.0);

    for (std::size_t li = 0; li < lags.size(); ++li) {
        const double h = lags[li];
        double sup = 0.0;
#pragma omp parallel reduction(max : sup)
        {
            CMatrix k0(d, d), k1(d, d);
#pragma omp for schedule(static)
            for (long p = 0; p < npairs; ++p) {
                const Point& x = grid[p / grid.size()];
                const Point& y = grid[p % grid.size()];
                eval_unchecked(spec, x, y, k0);
                // Displace each of the 2m coordinates of (x, y) by +h.
                for (int c = 0; c < 2 * m; ++c) {
                    Point x2 = x, y2 = y;
                    if (c < m) x2[c] += h; else y2[c - m] += h;
                    if (!spec.domain.contains(x2, 0.0) || !spec.domain.contains(y2, 0.0)) continue;
                    eval_unchecked(spec, x2, y2, k1);
                    sup = std::max(sup, (k1 - k0).norm());
                }
            }
        }
        rep.sup_modulus[li] = sup;
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (rep.sup_modulus[i] > 0.0) {
            lx.push_back(std::log(lags[i]));
            ly.push_back(std::log(rep.sup_modulus[i]));
        }
    }
    if (lx.empty()) {
        // Constant kernel: every modulus vanishes.
        rep.gamma_hat = 1.0;
        rep.c_hat = 0.0;
        rep.pass_half = true;
        return rep;
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw EstimationError("holder_modulus: fewer than two distinct nonzero lags");
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (my + slope * (lx[i] - mx));
        ss += r * r;
    }
    rep.residual = std::sqrt(ss / n);
    rep.gamma_hat = std::clamp(slope, 0.0, 1.0);
    // Intercept refit with the clamped slope.
    double icept = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) icept += ly[i] - rep.gamma_hat * lx[i];
    rep.c_hat = std::exp(icept / n);
    rep.pass_half = rep.gamma_hat > 0.5;
    return rep;
}

namespace {

struct ClippedCube {
    std::vector<double> lo, hi;  // 2m axes: x coordinates then y coordinates
};

ClippedCube clip_cubes(const Domain& dom, double r, const Point& x, const Point& y) {
    if (!(r > 0.0)) throw ArgumentError("local average radius must be positive");
    if (!dom.contains(x) || !dom.contains(y)) throw DomainError("local average centre outside domain");
    ClippedCube c;
    for (int pass = 0; pass < 2; ++pass) {
        const Point& p = pass == 0 ? x : y;
        for (int k = 0; k < dom.dim; ++k) {
            double a = p[k] - r, b = p[k] + r;
            if (dom.compact()) {
                a = std::max(a, dom.lower[k]);
                b = std::min(b, dom.upper[k]);
            }
            if (!(b > a)) throw DomainError("clipped averaging region is empty");
            c.lo.push_back(a);
            c.hi.push_back(b);
        }
    }
    return c;
}

/// Tensor Gauss-Legendre average of f(K(ξ, η)) over the clipped cube product.
template <class Acc, class F>
Acc cube_average(const KernelSpec& spec, const ClippedCube& cube, int q, Acc zero, F&& f) {
    if (q < 1) throw ArgumentError("quad_pts must be positive");
    std::vector<double> gx, gw;
    legendre_nodes(q, gx, gw);
    const int axes = static_cast<int>(cube.lo.size());
    const int m = axes / 2;
    long total = 1;
    for (int a = 0; a < axes; ++a) total *= q;

    const int d = spec.matrix_dim;
    Acc sum = zero;
    double wsum = 0.0;
    CMatrix k(d, d);
    std::vector<int> idx(axes, 0);
    for (long t = 0; t < total; ++t) {
        long rem = t;
        for (int a = axes - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % q);
            rem /= q;
        }
        Point xi{0.0, 0.0}, eta{0.0, 0.0};
        double w = 1.0;
        for (int a = 0; a < axes; ++a) {
            const double half = 0.5 * (cube.hi[a] - cube.lo[a]);
            const double v = cube.lo[a] + half * (gx[idx[a]] + 1.0);
            w *= gw[idx[a]];
            if (a < m) xi[a] = v; else eta[a - m] = v;
        }
        eval_unchecked(spec, xi, eta, k);
        sum += w * f(k);
        wsum += w;
    }
    return sum / wsum;
}

}  // namespace

CMatrix local_average(const KernelSpec& spec, double r, const Point& x, const Point& y,
                      int quad_pts) {
    const ClippedCube cube = clip_cubes(spec.domain, r, x, y);
    const int d = spec.matrix_dim;
    CMatrix zero = CMatrix::Zero(d, d);
    return cube_average(spec, cube, quad_pts, zero, [](const CMatrix& k) -> CMatrix { return k; });
}

double maximal_function(const KernelSpec& spec, std::span<const double> radii, const Point& x,
                        const Point& y, int p, int quad_pts) {
    if (radii.empty()) throw ArgumentError("maximal_function: radii must be nonempty");
    if (p != 1 && p != 2) throw ArgumentError("maximal_function: p must be 1 or 2");
    double best = 0.0;
    for (double r : radii) {
        const ClippedCube cube = clip_cubes(spec.domain, r, x, y);
        const double avg = cube_average(spec, cube, quad_pts, 0.0, [p](const CMatrix& k) {
            return p == 2 ? k.norm() : linalg::nuclear_norm(k);
        });
        best = std::max(best, avg);
    }
    return best;
}

// ------------------------------------------------------- Hermitian split

HermitianSplit hermitian_split(const KernelSpec& spec) {
    auto src = std::make_shared<const KernelSpec>(spec);
    const int d = spec.matrix_dim;

    auto make = [&](const std::string& suffix, bool skew) {
        KernelSpec out;
        out.id = spec.id + suffix;
        out.domain = spec.domain;
        out.matrix_dim = d;
        out.meta.hermitian = true;
        out.evaluator = [src, d, skew](const Point& x, const Point& y, MatrixRef o) {
            CMatrix kxy(d, d), kyx(d, d);
            eval_unchecked(*src, x, y, kxy);
            eval_unchecked(*src, y, x, kyx);
            if (skew) {
                o = cplx(0.0, 0.5) * (kxy - kyx.adjoint());
            } else {
                o = 0.5 * (kxy + kyx.adjoint());
            }
        };
        return out;
    };
    return {make(".herm", false), make(".skew", true)};
}

// ------------------------------------------------------ sampled kernels

KernelSpec grid_kernel(std::string id, const Domain& domain, int points, int matrix_dim,
                       std::vector<double> samples) {
    if (!domain.compact() || domain.dim != 1) {
        throw ArgumentError("grid kernels are supported on intervals only");
    }
    if (points < 2 || matrix_dim < 1) throw ArgumentError("grid kernel: bad grid dimensions");
    const std::size_t expect =
        static_cast<std::size_t>(points) * points * matrix_dim * matrix_dim;
    if (samples.size() != expect) {
        throw ArgumentError("grid kernel: expected " + std::to_string(expect) + " samples, got " +
                            std::to_string(samples.size()));
    }
    auto data = std::make_shared<const std::vector<double>>(std::move(samples));
    const double a = domain.lower[0], b = domain.upper[0];
    const double h = (b - a) / (points - 1);
    const int d = matrix_dim;

    KernelSpec spec;
    spec.id = std::move(id);
    spec.domain = domain;
    spec.matrix_dim = d;
    spec.evaluator = [data, a, b, h, points, d](const Point& x, const Point& y, MatrixRef out) {
        auto locate = [&](double v, int& i, double& t) {
            const double tol = 1e-12 * std::max(1.0, b - a);
            if (v < a - tol || v > b + tol) throw DomainError("grid kernel: point outside sample hull");
            const double s = std::clamp((v - a) / h, 0.0, static_cast<double>(points - 1));
            i = std::min(static_cast<int>(s), points - 2);
            t = s - i;
        };
        int ix, iy;
        double tx, ty;
        locate(x[0], ix, tx);
        locate(y[0], iy, ty);
        auto sample = [&](int xi, int yi, int r, int c) {
            return (*data)[((static_cast<std::size_t>(xi) * points + yi) * d + r) * d + c];
        };
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) {
                out(r, c) = (1 - tx) * (1 - ty) * sample(ix, iy, r, c) +
                            tx * (1 - ty) * sample(ix + 1, iy, r, c) +
                            (1 - tx) * ty * sample(ix, iy + 1, r, c) +
                            tx * ty * sample(ix + 1, iy + 1, r, c);
            }
        }
    };
    return spec;
}

KernelSpec restrict_to(const KernelSpec& spec, const Domain& domain) {
    if (!domain.compact()) throw ArgumentError("restrict_to needs a compact target domain");
    if (domain.dim != spec.domain.dim) throw ArgumentError("restrict_to: dimension mismatch");
    KernelSpec out = spec;
    out.id = spec.id + "@" + domain.describe();
    out.domain = domain;
    return out;
}

}  // namespace opkern
