#include "opkern/determinant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "opkern/errors.hpp"

namespace opkern {

cplx det1(const SpectralData& sd, cplx z) {
    cplx p = 1.0;
    for (const auto& l : sd.eigenvalues) p *= 1.0 + z * l;
    return p;
}

cplx det2(const SpectralData& sd, cplx z) {
    cplx p = 1.0;
    for (const auto& l : sd.eigenvalues) p *= (1.0 + z * l) * std::exp(-z * l);
    return p;
}

cplx det2_via_R2(const BlockOperator& op, cplx z) {
    const CMatrix& a = op.matrix();
    if (a.rows() > 2000) {
        throw ArgumentError("det2_via_R2: dimension " + std::to_string(a.rows()) +
                            " exceeds the dense exponential cap of 2000");
    }
    const CMatrix za = z * a;
    const CMatrix id = CMatrix::Identity(a.rows(), a.cols());
    const CMatrix e = (-za).exp();
    return linalg::determinant((id + za) * e);
}

// ------------------------------------------------------ Fredholm coefficients

namespace {

// Determinant of a small dense matrix by partial-pivot elimination; destroys m.
template <class T>
T small_det(std::array<T, 64>& m, int n) {
    T det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        double best = std::norm(m[c * n + c]);
        for (int r = c + 1; r < n; ++r) {
            const double v = std::norm(m[r * n + c]);
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
            det = -det;
        }
        const T d = m[c * n + c];
        det *= d;
        const T inv = 1.0 / d;
        for (int r = c + 1; r < n; ++r) {
            const T f = m[r * n + c] * inv;
            for (int k = c + 1; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
        }
    }
    return det;
}

constexpr long kTupleBudget = 1L << 24;

long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Enumerates node tuples for one (top, second) index pair and accumulates the
// weighted integrand. Blocks of B are filled incrementally as points are fixed.
struct TupleSum {
    const KernelSpec& spec;
    int n, d;
    bool modified;
    bool simplex;
    // simplex: 1-D Gauss nodes on [0, 1]; box: the reduced rule's nodes
    std::vector<double> u, uw;
    double a = 0.0, len = 1.0;
    std::vector<Point> box_nodes;
    std::vector<double> box_weights;

    std::size_t count() const { return simplex ? u.size() : box_nodes.size(); }

    struct State {
        std::vector<Point> pts;
        std::vector<double> s;
        CMatrix b;
    };

    void place(State& st, int m) const {
        for (int k = m; k < n; ++k) {
            eval_unchecked(spec, st.pts[m], st.pts[k], st.b.block(m * d, k * d, d, d));
            if (k != m) eval_unchecked(spec, st.pts[k], st.pts[m], st.b.block(k * d, m * d, d, d));
        }
    }

    double choose(State& st, int m, std::size_t k) const {
        if (simplex) {
            st.s[m] = (m == n - 1 ? 1.0 : st.s[m + 1]) * u[k];
            st.pts[m] = at(a + len * st.s[m]);
            place(st, m);
            return uw[k] * (m >= 1 ? st.s[m] : 1.0);
        }
        st.pts[m] = box_nodes[k];
        place(st, m);
        return box_weights[k];
    }

    cplx descend(State& st, int m, double w) const {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < count(); ++k) {
            const double wk = w * choose(st, m, k);
            acc += m == 0 ? wk * multi_index_determinant(st.b, n, d, modified) : descend(st, m - 1, wk);
        }
        return acc;
    }

    cplx task(std::size_t top, std::size_t second) const {
        State st{std::vector<Point>(n), std::vector<double>(n), CMatrix::Zero(n * d, n * d)};
        const double w = choose(st, n - 1, top);
        const double w2 = w * choose(st, n - 2, second);
        return n == 2 ? w2 * multi_index_determinant(st.b, n, d, modified) : descend(st, n - 3, w2);
    }

    double scale() const { return simplex ? std::pow(len, n) : 1.0 / factorial(n); }
};

TupleSum make_tuple_sum(const KernelSpec& spec, const QuadratureRule& rule, int n, bool modified) {
    TupleSum ts{spec, n, spec.matrix_dim, modified, rule.domain.dim == 1, {}, {}, 0.0, 1.0, {}, {}};
    const int q = fredholm_order(rule, n);
    if (ts.simplex) {
        legendre_nodes(q, ts.u, ts.uw);
        for (int i = 0; i < q; ++i) {
            ts.u[i] = 0.5 * (ts.u[i] + 1.0);
            ts.uw[i] *= 0.5;
        }
        ts.a = rule.domain.lower[0];
        ts.len = rule.domain.upper[0] - rule.domain.lower[0];
    } else {
        const QuadratureRule reduced = make_rule(rule.domain, q, rule.kind);
        ts.box_nodes = reduced.nodes;
        ts.box_weights = reduced.weights;
    }
    return ts;
}

void check_fredholm_args(const KernelSpec& spec, const QuadratureRule& rule, int n) {
    if (n < 0 || n > kMaxFredholmOrder) {
        throw ArgumentError("fredholm_coeff: n must lie in [0, " + std::to_string(kMaxFredholmOrder) + "]");
    }
    if (!spec.domain.compact() || !spec.domain.same_as(rule.domain)) {
        throw ArgumentError("fredholm_coeff: rule and kernel must share a compact domain");
    }
}

cplx first_coeff(const KernelSpec& spec, const QuadratureRule& rule, bool modified) {
    if (modified) return 0.0;
    cplx acc = 0.0;
    CMatrix k(spec.matrix_dim, spec.matrix_dim);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        eval_unchecked(spec, rule.nodes[i], rule.nodes[i], k);
        acc += rule.weights[i] * multi_index_determinant(k, 1, spec.matrix_dim, false);
    }
    return acc;
}

cplx finish_coeff(const std::vector<cplx>& parts, double scale) {
    cplx acc = 0.0;
    for (const auto& p : parts) acc += p;
    acc *= scale;
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag())) {
        throw EvaluationError("fredholm_coeff: non-finite result");
    }
    return acc;
}

}  // namespace

cplx multi_index_determinant(const CMatrix& b, int n, int d, bool modified) {
    const cplx* data = b.data();
    const Eigen::Index ld = b.outerStride();
    bool real = true;
    for (Eigen::Index j = 0; j < b.cols() && real; ++j)
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            if (data[i + j * ld].imag() != 0.0) { real = false; break; }

    std::array<int, kMaxFredholmOrder> j{};
    std::array<cplx, 64> m;
    std::array<double, 64> mr;
    cplx total = 0.0;
    while (true) {
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const cplx v = (modified && r == c) ? cplx(0.0) : data[(r * d + j[r]) + (c * d + j[c]) * ld];
                if (real) mr[r * n + c] = v.real();
                else m[r * n + c] = v;
            }
        }
        total += real ? cplx(small_det(mr, n)) : small_det(m, n);
        int pos = 0;
        while (pos < n && ++j[pos] == d) j[pos++] = 0;
        if (pos == n) break;
    }
    return total;
}

int fredholm_order(const QuadratureRule& rule, int n) {
    if (n <= 1) return rule.order;
    const int axes = rule.domain.dim;
    int q = n >= 3 ? std::min(rule.order, 16) : rule.order;
    while (q > 1 && ipow(ipow(q, axes), n) > kTupleBudget) --q;
    return q;
}

cplx fredholm_coeff(const KernelSpec& spec, const QuadratureRule& rule, int n, bool modified) {
    check_fredholm_args(spec, rule, n);
    if (n == 0) return 1.0;
    if (n == 1) return first_coeff(spec, rule, modified);
    const TupleSum ts = make_tuple_sum(spec, rule, n, modified);
    const long q = static_cast<long>(ts.count());
    std::vector<cplx> parts(q * q);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long t = 0; t < q * q; ++t) {
        try {
            parts[t] = ts.task(t / q, t % q);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return finish_coeff(parts, ts.scale());
}

cplx fredholm_coeff_serial(const KernelSpec& spec, const QuadratureRule& rule, int n, bool modified) {
    check_fredholm_args(spec, rule, n);
    if (n == 0) return 1.0;
    if (n == 1) return first_coeff(spec, rule, modified);
    const TupleSum ts = make_tuple_sum(spec, rule, n, modified);
    const std::size_t q = ts.count();
    std::vector<cplx> parts(q * q);
    for (std::size_t t = 0; t < q * q; ++t) parts[t] = ts.task(t / q, t % q);
    return finish_coeff(parts, ts.scale());
}

// ------------------------------------------------------------------ series

const char* to_string(SeriesMethod m) {
    return m == SeriesMethod::TensorQuadrature ? "tensor_quadrature" : "eigen_derived";
}

DeterminantSeries fredholm_series(const KernelSpec& spec, const QuadratureRule& rule, int n_max,
                                  bool modified) {
    if (n_max < 0 || n_max > kMaxFredholmOrder) {
        throw ArgumentError("fredholm_series: order must lie in [0, " + std::to_string(kMaxFredholmOrder) + "]");
    }
    DeterminantSeries s{{}, SeriesMethod::TensorQuadrature, modified, spec.id};
    for (int n = 0; n <= n_max; ++n) s.coeffs.push_back(fredholm_coeff(spec, rule, n, modified));
    return s;
}

DeterminantSeries eigen_series(const SpectralData& sd, int n_max, bool modified, std::string kernel_id) {
    if (n_max < 0) throw ArgumentError("eigen_series: order must be nonnegative");
    // log det(I + zA) = Σ_k (−1)^{k+1} p_k z^k / k with power sums p_k; the
    // 2-modified determinant drops the k = 1 term.
    std::vector<cplx> g(n_max + 1, 0.0);
    std::vector<cplx> pw(sd.eigenvalues.begin(), sd.eigenvalues.end());
    for (int k = 1; k <= n_max; ++k) {
        cplx pk = 0.0;
        for (std::size_t l = 0; l < pw.size(); ++l) {
            pk += pw[l];
            pw[l] *= sd.eigenvalues[l];
        }
        if (k == 1 && modified) continue;
        g[k] = (k % 2 == 1 ? 1.0 : -1.0) * pk / static_cast<double>(k);
    }
    DeterminantSeries s{std::vector<cplx>(n_max + 1, 0.0), SeriesMethod::EigenDerived, modified,
                        std::move(kernel_id)};
    s.coeffs[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        cplx acc = 0.0;
        for (int k = 1; k <= n; ++k) acc += static_cast<double>(k) * g[k] * s.coeffs[n - k];
        s.coeffs[n] = acc / static_cast<double>(n);
    }
    return s;
}

SeriesValue series_eval(const DeterminantSeries& series, cplx z) {
    SeriesValue out{0.0, 0.0};
    for (auto it = series.coeffs.rbegin(); it != series.coeffs.rend(); ++it) out.value = out.value * z + *it;
    if (!series.coeffs.empty()) {
        const int n = static_cast<int>(series.coeffs.size()) - 1;
        out.truncation_estimate = std::abs(series.coeffs.back()) * std::pow(std::abs(z), n);
    }
    return out;
}

GrowthEstimate order_of_growth(const DeterminantSeries& series) {
    GrowthEstimate g;
    for (int n = 1; n < static_cast<int>(series.coeffs.size()); ++n) {
        const double m = std::abs(series.coeffs[n]);
        if (m > 0.0 && m < 1.0 && std::isfinite(m)) g.window.push_back(n);
    }
    if (g.window.size() < 4) {
        throw EstimationError("order_of_growth: need at least 4 nonzero coefficients with |b_n| < 1, have " +
                              std::to_string(g.window.size()));
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(g.window.size());
    Eigen::MatrixXd basis(rows, 4);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double n = g.window[r];
        const double ln_inv = -std::log(std::abs(series.coeffs[g.window[r]]));
        basis.row(r) << n * std::log(n), n, std::log(n), 1.0;
        y[r] = ln_inv;
        if (n > 1.0) g.rho_raw = std::max(g.rho_raw, n * std::log(n) / ln_inv);
    }
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(y);
    g.residual = std::sqrt((basis * coef - y).squaredNorm() / static_cast<double>(rows));
    g.rho_hat = coef[0] > 0.0 ? 1.0 / coef[0] : std::numeric_limits<double>::infinity();
    return g;
}

std::vector<cplx> det_zeros(const SpectralData& sd, double radius) {
    if (!(radius > 0.0)) throw ArgumentError("det_zeros: radius must be positive");
    std::vector<cplx> zs;
    for (const auto& l : sd.eigenvalues) {
        if (l == 0.0) continue;
        const cplx z = -1.0 / l;
        if (std::abs(z) <= radius) zs.push_back(z);
    }
    std::stable_sort(zs.begin(), zs.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    return zs;
}

std::vector<cplx> ZGrid::points() const {
    std::vector<cplx> out;
    for (int i = 0; i < nre; ++i) {
        const double re = nre == 1 ? re0 : re0 + (re1 - re0) * i / (nre - 1);
        for (int k = 0; k < nim; ++k) {
            const double im = nim == 1 ? im0 : im0 + (im1 - im0) * k / (nim - 1);
            out.emplace_back(re, im);
        }
    }
    return out;
}

ZGrid parse_z_grid(const std::string& text) {
    ZGrid g;
    char c1, c2, comma, c3, c4;
    std::istringstream in(text);
    if (!(in >> g.re0 >> c1 >> g.re1 >> c2 >> g.nre >> comma >> g.im0 >> c3 >> g.im1 >> c4 >> g.nim) ||
        c1 != ':' || c2 != ':' || comma != ',' || c3 != ':' || c4 != ':') {
        throw ArgumentError("z-grid must look like re0:re1:nre,im0:im1:nim, got '" + text + "'");
    }
    in >> std::ws;
    if (!in.eof()) throw ArgumentError("trailing characters in z-grid '" + text + "'");
    if (g.nre < 1 || g.nim < 1) throw ArgumentError("z-grid counts must be positive");
    return g;
}

}  // namespace opkern
