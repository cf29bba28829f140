#include "opkern/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "opkern/errors.hpp"

namespace opkern {

const char* to_string(RuleKind kind) {
    return kind == RuleKind::GaussLegendre ? "gauss_legendre" : "trapezoid";
}

void legendre_nodes(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ArgumentError("legendre_nodes: n must be positive");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);

    // P_n(x) and P_n'(x) by the three-term recurrence.
    auto legendre = [n](double x, double& dp) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        return p1;
    };

    // Newton from Tricomi's initial guess; roots are symmetric so only the
    // upper half is iterated.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        const double theta = std::numbers::pi * (4.0 * (i + 1) - 1.0) / (4.0 * n + 2.0);
        double x = (1.0 - (n - 1.0) / (8.0 * n * n * n)) * std::cos(theta);
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            const double step = legendre(x, dp) / dp;
            x -= step;
            if (std::abs(step) <= 1e-16) break;
        }
        legendre(x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
}

namespace {

void check_interval(int n, double a, double b, int min_n) {
    if (n < min_n) throw ArgumentError("quadrature: too few points (" + std::to_string(n) + ")");
    if (!(a < b)) throw ArgumentError("quadrature: interval must satisfy a < b");
}

void rule_1d(RuleKind kind, int n, double a, double b, std::vector<double>& x,
             std::vector<double>& w) {
    if (kind == RuleKind::GaussLegendre) {
        check_interval(n, a, b, 1);
        legendre_nodes(n, x, w);
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int i = 0; i < n; ++i) {
            x[i] = mid + half * x[i];
            w[i] *= half;
        }
        return;
    }
    check_interval(n, a, b, 2);
    x.resize(n);
    w.resize(n);
    const double h = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
        x[i] = a + h * i;
        w[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
    x[n - 1] = b;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
    return make_rule(Domain::interval(a, b), n, RuleKind::GaussLegendre);
}

QuadratureRule trapezoid(int n, double a, double b) {
    return make_rule(Domain::interval(a, b), n, RuleKind::Trapezoid);
}

QuadratureRule make_rule(const Domain& domain, int order, RuleKind kind) {
    if (!domain.compact()) throw DomainError("quadrature rules need a compact domain");
    QuadratureRule rule;
    rule.order = order;
    rule.kind = kind;
    rule.domain = domain;

    std::vector<double> x0, w0;
    rule_1d(kind, order, domain.lower[0], domain.upper[0], x0, w0);
    if (domain.dim == 1) {
        for (int i = 0; i < order; ++i) {
            rule.nodes.push_back(at(x0[i]));
            rule.weights.push_back(w0[i]);
        }
        return rule;
    }
    std::vector<double> x1, w1;
    rule_1d(kind, order, domain.lower[1], domain.upper[1], x1, w1);
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            rule.nodes.push_back(at(x0[i], x1[j]));
            rule.weights.push_back(w0[i] * w1[j]);
        }
    }
    return rule;
}

}  // namespace opkern
