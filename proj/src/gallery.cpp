#include "opkern/gallery.hpp"

#include <cmath>
#include <numbers>

#include "opkern/errors.hpp"

namespace opkern::gallery {

namespace {

constexpr double pi = std::numbers::pi;

double distance(const Point& x, const Point& y, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
}

void require_dim(int d) {
    if (d < 1) throw ArgumentError("matrix dimension must be positive");
}

}  // namespace

KernelSpec min_kernel() {
    KernelSpec s;
    s.id = "min";
    s.domain = Domain::interval(0.0, 1.0);
    s.evaluator = [](const Point& x, const Point& y, MatrixRef out) { out(0, 0) = std::min(x[0], y[0]); };
    s.meta.hermitian = true;
    s.meta.psd = true;
    s.meta.holder_exponent = 1.0;
    s.meta.exact_singular_value = [](int k) { return 4.0 / ((2.0 * k - 1) * (2.0 * k - 1) * pi * pi); };
    return s;
}

KernelSpec brownian_bridge() {
    KernelSpec s;
    s.id = "brownian_bridge";
    s.domain = Domain::interval(0.0, 1.0);
    s.evaluator = [](const Point& x, const Point& y, MatrixRef out) {
        out(0, 0) = std::min(x[0], y[0]) - x[0] * y[0];
    };
    s.meta.hermitian = true;
    s.meta.psd = true;
    s.meta.holder_exponent = 1.0;
    s.meta.exact_singular_value = [](int k) { return 1.0 / (double(k) * k * pi * pi); };
    return s;
}

KernelSpec constant_l2(int d) {
    require_dim(d);
    KernelSpec s;
    s.id = "constant_l2";
    s.domain = Domain::interval(0.0, 1.0);
    s.matrix_dim = d;
    s.evaluator = [d](const Point&, const Point&, MatrixRef out) {
        for (int n = 0; n < d; ++n) out(n, n) = 1.0 / (n + 1);
    };
    s.meta.hermitian = true;
    s.meta.psd = true;
    s.meta.holder_exponent = 1.0;
    s.meta.exact_singular_value = [d](int k) { return k <= d ? 1.0 / k : 0.0; };
    return s;
}

KernelSpec shift_l2(int d) {
    require_dim(d);
    KernelSpec s;
    s.id = "shift_l2";
    s.domain = Domain::interval(0.0, 1.0);
    s.matrix_dim = d;
    s.evaluator = [d](const Point&, const Point&, MatrixRef out) {
        for (int n = 0; n + 1 < d; ++n) out(n, n + 1) = 1.0 / (n + 1);
    };
    s.meta.holder_exponent = 1.0;
    s.meta.exact_singular_value = [d](int k) { return k < d ? 1.0 / k : 0.0; };
    return s;
}

KernelSpec semi_separable(double alpha, const CMatrix& m, const Domain& domain) {
    if (!(alpha > 0.0)) throw ArgumentError("semi_separable: alpha must be positive");
    if (m.rows() != m.cols() || m.rows() < 1) throw ArgumentError("semi_separable: M must be square");
    KernelSpec s;
    s.id = "semi_separable";
    s.domain = domain;
    s.matrix_dim = static_cast<int>(m.rows());
    const int dim = domain.dim;
    s.evaluator = [alpha, m, dim](const Point& x, const Point& y, MatrixRef out) {
        out = std::exp(-alpha * distance(x, y, dim)) * m;
    };
    s.meta.hermitian = linalg::is_hermitian(m, 1e-14);
    if (s.meta.hermitian) {
        s.meta.psd = linalg::hermitian_eig(m, false).values.minCoeff() >= 0.0;
    }
    s.meta.holder_exponent = 1.0;
    s.meta.decay_rate = alpha;
    return s;
}

KernelSpec separable(std::function<double(const Point&)> g, std::function<double(const Point&)> h,
                     const CMatrix& m, const Domain& domain, std::string id) {
    if (m.rows() != m.cols() || m.rows() < 1) throw ArgumentError("separable: M must be square");
    KernelSpec s;
    s.id = std::move(id);
    s.domain = domain;
    s.matrix_dim = static_cast<int>(m.rows());
    s.evaluator = [g, h, m](const Point& x, const Point& y, MatrixRef out) { out = (g(x) * h(y)) * m; };
    s.meta.holder_exponent = 1.0;
    return s;
}

KernelSpec rank_one(std::function<double(const Point&)> g, const CMatrix& m, const Domain& domain) {
    KernelSpec s = separable(g, g, m, domain, "rank_one");
    s.meta.hermitian = linalg::is_hermitian(m, 1e-14);
    if (s.meta.hermitian) {
        s.meta.psd = linalg::hermitian_eig(m, false).values.minCoeff() >= 0.0;
    }
    return s;
}

KernelSpec abs_power(double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) throw ArgumentError("abs_power: gamma must lie in (0, 1]");
    KernelSpec s;
    s.id = "abs_power";
    s.domain = Domain::interval(0.0, 1.0);
    s.evaluator = [gamma](const Point& x, const Point& y, MatrixRef out) {
        out(0, 0) = std::pow(std::abs(x[0] - y[0]), gamma);
    };
    s.meta.hermitian = true;
    s.meta.holder_exponent = gamma;
    return s;
}

KernelSpec gaussian(const Domain& domain) {
    KernelSpec s;
    s.id = "gaussian";
    s.domain = domain;
    const int dim = domain.dim;
    s.evaluator = [dim](const Point& x, const Point& y, MatrixRef out) {
        const double r = distance(x, y, dim);
        out(0, 0) = std::exp(-r * r);
    };
    s.meta.hermitian = true;
    s.meta.psd = true;
    s.meta.holder_exponent = 1.0;
    return s;
}

KernelSpec birman_schwinger(double alpha) {
    if (!(alpha > 0.0)) throw ArgumentError("birman_schwinger: alpha must be positive");
    KernelSpec s;
    s.id = "birman_schwinger";
    s.domain = Domain::real_line();
    s.evaluator = [alpha](const Point& x, const Point& y, MatrixRef out) {
        out(0, 0) = std::exp(-alpha * std::abs(x[0] - y[0])) / (std::cosh(x[0]) * std::cosh(y[0]));
    };
    s.meta.hermitian = true;
    s.meta.psd = true;
    s.meta.holder_exponent = 1.0;
    s.meta.decay_rate = alpha;
    return s;
}

KernelSpec zero(int d, const Domain& domain) {
    require_dim(d);
    KernelSpec s;
    s.id = "zero";
    s.domain = domain;
    s.matrix_dim = d;
    s.evaluator = [](const Point&, const Point&, MatrixRef) {};
    s.meta.hermitian = true;
    s.meta.psd = true;
    s.meta.holder_exponent = 1.0;
    s.meta.exact_singular_value = [](int) { return 0.0; };
    return s;
}

CMatrix hilbert_matrix(int d) {
    CMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = 1.0 / (i + j + 1.0);
    return m;
}

CMatrix upper_triangular_matrix(int d) {
    CMatrix m = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) m(i, j) = 1.0 / (1.0 + j - i);
    return m;
}

std::vector<Entry> list() {
    return {
        {"min", "", "min(x,y) on [0,1]; Hermitian PSD; eigenvalues 4/((2k-1)^2 pi^2)"},
        {"brownian_bridge", "", "min(x,y) - xy on [0,1]; Hermitian PSD; eigenvalues 1/(k^2 pi^2)"},
        {"constant_l2", "d", "constant diag(1,...,1/d); mu_n = 1/n, not trace class as d -> inf"},
        {"shift_l2", "d", "constant 1/n at (n,n+1); nilpotent, mu_n = 1/n, not trace class as d -> inf"},
        {"semi_separable", "alpha d diag1..diagd offdiag", "exp(-alpha|x-y|) M; interval, box or real line"},
        {"rank_one", "d", "exp(x) exp(y) M with M the Hilbert matrix; finite rank"},
        {"separable", "d", "exp(x) cos(y) M with M upper triangular; non-normal"},
        {"abs_power", "gamma", "|x-y|^gamma on [0,1]; Hoelder exponent gamma"},
        {"gaussian", "", "exp(-(x-y)^2); faster than exponential decay"},
        {"birman_schwinger", "alpha", "sech(x) exp(-alpha|x-y|) sech(y) on the real line"},
        {"zero", "d", "identically zero"},
    };
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

int dim_param(const std::map<std::string, double>& p, int fallback) {
    const double d = param(p, "d", fallback);
    if (d < 1 || d != std::floor(d)) throw ArgumentError("parameter d must be a positive integer");
    return static_cast<int>(d);
}

Point::value_type exp_sum(const Point& x) { return std::exp(x[0] + x[1]); }

}  // namespace

KernelSpec make(const std::string& id, const std::map<std::string, double>& params,
                const std::optional<Domain>& domain) {
    const Domain unit = Domain::interval(0.0, 1.0);
    const Domain dom = domain.value_or(unit);
    KernelSpec s;
    if (id == "min") {
        s = min_kernel();
    } else if (id == "brownian_bridge") {
        s = brownian_bridge();
    } else if (id == "constant_l2") {
        s = constant_l2(dim_param(params, 4));
        s.domain = dom;
    } else if (id == "shift_l2") {
        s = shift_l2(dim_param(params, 4));
        s.domain = dom;
    } else if (id == "semi_separable") {
        const int d = dim_param(params, 1);
        CMatrix m = CMatrix::Zero(d, d);
        const double off = param(params, "offdiag", 0.0);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) m(i, j) = off;
            m(i, i) = param(params, "diag" + std::to_string(i + 1), 1.0);
        }
        return semi_separable(param(params, "alpha", 1.0), m, dom);
    } else if (id == "rank_one") {
        const int d = dim_param(params, 2);
        return rank_one(exp_sum, hilbert_matrix(d), dom);
    } else if (id == "separable") {
        const int d = dim_param(params, 2);
        return separable(exp_sum, [](const Point& y) { return std::cos(y[0] + y[1]); },
                         upper_triangular_matrix(d), dom);
    } else if (id == "abs_power") {
        s = abs_power(param(params, "gamma", 0.5));
    } else if (id == "gaussian") {
        return gaussian(domain.value_or(Domain::real_line()));
    } else if (id == "birman_schwinger") {
        return birman_schwinger(param(params, "alpha", 1.0));
    } else if (id == "zero") {
        return zero(dim_param(params, 1), dom);
    } else {
        throw ArgumentError("unknown gallery kernel '" + id + "'");
    }
    return s;
}

}  // namespace opkern::gallery
