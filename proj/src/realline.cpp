#include "opkern/realline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "opkern/errors.hpp"

namespace opkern {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double den = m * sxx - sx * sx;
    if (x.size() < 2 || den <= 0.0) throw EstimationError("decay fit: lags do not vary");
    LineFit f;
    f.slope = (m * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / m;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / m);
    return f;
}

void check_real_line(const KernelSpec& spec, const char* who) {
    if (spec.domain.kind != Domain::Kind::RealLine) {
        throw ArgumentError(std::string(who) + ": kernel must live on the real line");
    }
}

void check_params(const TransformParams& p) {
    if (!(p.alpha > 0.0) || !(p.delta > 0.0)) throw ArgumentError("transform: alpha and delta must be positive");
    if (p.delta >= p.alpha / 3.0) {
        throw PreconditionError("transform: delta = " + std::to_string(p.delta) +
                                " is not below alpha/3 = " + std::to_string(p.alpha / 3.0) +
                                "; boundary vanishing is not guaranteed");
    }
}

}  // namespace

DecayReport estimate_decay(const KernelSpec& spec, double probe_radius, int samples) {
    check_real_line(spec, "estimate_decay");
    if (!(probe_radius > 1.0)) throw ArgumentError("estimate_decay: probe_radius must exceed 1");
    if (samples < 4) throw ArgumentError("estimate_decay: need at least 4 samples per axis");

    const int d = spec.matrix_dim;
    std::vector<double> grid(samples);
    for (int i = 0; i < samples; ++i) grid[i] = -probe_radius + 2.0 * probe_radius * i / (samples - 1);

    std::vector<double> lags, logs;
    CMatrix k(d, d);
    for (double x : grid) {
        for (double y : grid) {
            eval_unchecked(spec, at(x), at(y), k);
            const double nrm = k.norm();
            if (nrm > 0.0 && std::isfinite(nrm)) {
                lags.push_back(std::abs(x - y));
                logs.push_back(std::log(nrm));
            }
        }
    }
    if (lags.size() < 4) throw EstimationError("estimate_decay: kernel vanishes on the probe grid");
    const LineFit fit = fit_line(lags, logs);
    if (fit.slope >= 0.0) throw EstimationError("estimate_decay: samples do not decay with |x - y|");

    DecayReport rep;
    rep.params.alpha = -fit.slope;
    rep.params.c_decay = std::exp(fit.intercept);
    rep.params.delta = choose_delta(rep.params.alpha);
    rep.params.R = probe_radius / 4.0;
    rep.fit_residual = fit.residual;
    rep.pairs_used = static_cast<int>(lags.size());

    // Per-window slopes reveal faster-than-exponential decay.
    const double span = 2.0 * probe_radius;
    constexpr int kWindows = 4;
    for (int w = 0; w < kWindows; ++w) {
        const double lo = span * w / kWindows, hi = span * (w + 1) / kWindows;
        std::vector<double> wx, wy;
        for (std::size_t i = 0; i < lags.size(); ++i) {
            if (lags[i] >= lo && (lags[i] < hi || (w == kWindows - 1 && lags[i] <= hi))) {
                wx.push_back(lags[i]);
                wy.push_back(logs[i]);
            }
        }
        try {
            rep.windows.push_back({lo, hi, -fit_line(wx, wy).slope});
        } catch (const EstimationError&) {
            // window without spread in lags; skip it
        }
    }
    if (rep.windows.size() >= 2) {
        const double first = rep.windows.front().alpha, last = rep.windows.back().alpha;
        rep.super_exponential = first > 0.0 && last > 1.25 * first;
    }

    const double h = 1e-5;
    CMatrix kp(d, d), km(d, d);
    for (double x : grid) {
        for (double y : grid) {
            eval_unchecked(spec, at(x + h), at(y), kp);
            eval_unchecked(spec, at(x - h), at(y), km);
            const double dx = (kp - km).norm() / (2 * h);
            eval_unchecked(spec, at(x), at(y + h), kp);
            eval_unchecked(spec, at(x), at(y - h), km);
            const double dy = (kp - km).norm() / (2 * h);
            rep.derivative_c = std::max(rep.derivative_c, std::max(dx, dy) * std::exp(rep.params.alpha * std::abs(x - y)));
        }
    }

    const int local = 33;
    const double r = rep.params.R;
    const double step = 2.0 * r / (local - 1);
    CMatrix k0(d, d);
    for (int i = 0; i < local; ++i) {
        for (int j = 0; j < local; ++j) {
            const double x = -r + step * i, y = -r + step * j;
            eval_unchecked(spec, at(x), at(y), k0);
            if (i + 1 < local) {
                eval_unchecked(spec, at(x + step), at(y), k);
                rep.local_lipschitz = std::max(rep.local_lipschitz, (k - k0).norm() / step);
            }
            if (j + 1 < local) {
                eval_unchecked(spec, at(x), at(y + step), k);
                rep.local_lipschitz = std::max(rep.local_lipschitz, (k - k0).norm() / step);
            }
        }
    }
    return rep;
}

double choose_delta(double alpha) {
    if (!(alpha > 0.0)) throw ArgumentError("choose_delta: alpha must be positive");
    return alpha / 6.0;
}

double phi(double y, double delta) {
    if (!(std::abs(y) < 1.0)) throw DomainError("phi: y must lie in (-1, 1)");
    return std::atanh(y) / delta;
}

double phi_inv(double x, double delta) { return std::tanh(delta * x); }

double phi_prime(double y, double delta) {
    if (!(std::abs(y) < 1.0)) throw DomainError("phi_prime: y must lie in (-1, 1)");
    return 1.0 / (delta * (1.0 - y * y));
}

KernelSpec transform_kernel(const KernelSpec& spec, const TransformParams& params) {
    check_real_line(spec, "transform_kernel");
    check_params(params);
    auto src = std::make_shared<KernelSpec>(spec);
    const double delta = params.delta;
    KernelSpec out;
    out.id = spec.id + "~compactified";
    out.domain = Domain::interval(-1.0, 1.0);
    out.matrix_dim = spec.matrix_dim;
    out.meta.hermitian = spec.meta.hermitian;
    out.meta.psd = spec.meta.psd;
    out.evaluator = [src, delta](const Point& y, const Point& yp, MatrixRef k) {
        if (std::abs(y[0]) >= 1.0 || std::abs(yp[0]) >= 1.0) {
            k.setZero();
            return;
        }
        const double s = std::sqrt(phi_prime(y[0], delta) * phi_prime(yp[0], delta));
        src->evaluator(at(phi(y[0], delta)), at(phi(yp[0], delta)), k);
        k *= s;
    };
    return out;
}

std::vector<BoundaryRow> boundary_table(const KernelSpec& transformed, std::span<const double> eps,
                                        std::span<const double> grid) {
    std::vector<double> nodes(grid.begin(), grid.end()), w;
    if (nodes.empty()) legendre_nodes(64, nodes, w);
    const int d = transformed.matrix_dim;
    CMatrix k(d, d);
    std::vector<BoundaryRow> rows;
    for (double e : eps) {
        if (!(e > 0.0 && e < 1.0)) throw ArgumentError("boundary_table: eps must lie in (0, 1)");
        BoundaryRow row{e, 0.0};
        for (double side : {1.0, -1.0}) {
            for (double yp : nodes) {
                eval_unchecked(transformed, at(side * (1.0 - e)), at(yp), k);
                row.sup_norm = std::max(row.sup_norm, k.norm());
            }
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

bool vanishes_on_probe(const KernelSpec& spec, double radius, int samples) {
    CMatrix k(spec.matrix_dim, spec.matrix_dim);
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < samples; ++j) {
            const double x = -radius + 2.0 * radius * i / (samples - 1);
            const double y = -radius + 2.0 * radius * j / (samples - 1);
            eval_unchecked(spec, at(x), at(y), k);
            if (k.norm() != 0.0) return false;
        }
    }
    return true;
}

}  // namespace

TransformResult spectrum_via_transform(const KernelSpec& spec, const TransformOptions& opts) {
    check_real_line(spec, "spectrum_via_transform");
    TransformResult res;
    if (vanishes_on_probe(spec, opts.probe_radius, opts.samples)) {
        res.zero_kernel = true;
        res.decay.params = TransformParams{1.0, 0.0, choose_delta(1.0), 0.0};
    } else {
        res.decay = estimate_decay(spec, opts.probe_radius, opts.samples);
    }
    if (opts.delta) res.decay.params.delta = *opts.delta;
    const KernelSpec tilde = transform_kernel(spec, res.decay.params);
    auto refined = refine_until(tilde, opts.tol, opts.k_track, opts.n0, opts.n_max);
    res.history = std::move(refined.history);
    res.spectrum = decompose(refined.op, false);
    return res;
}

double transformed_norm_sq(const std::function<double(double)>& f, double delta, int n) {
    if (!(delta > 0.0)) throw ArgumentError("transformed_norm_sq: delta must be positive");
    const QuadratureRule rule = gauss_legendre(n, -1.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double y = rule.nodes[i][0];
        const double v = f(phi(y, delta));
        acc += rule.weights[i] * v * v * phi_prime(y, delta);
    }
    return acc;
}

}  // namespace opkern
