#pragma once

#include <vector>

#include "opkern/kernel.hpp"

namespace opkern {

enum class RuleKind { GaussLegendre, Trapezoid };

const char* to_string(RuleKind kind);

/// Nodes and positive weights on a compact domain; tensor-product on boxes.
struct QuadratureRule {
    std::vector<Point> nodes;
    std::vector<double> weights;
    int order = 0;  // points per axis
    RuleKind kind = RuleKind::GaussLegendre;
    Domain domain;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre nodes and weights on [-1, 1], ascending.
void legendre_nodes(int n, std::vector<double>& nodes, std::vector<double>& weights);

QuadratureRule gauss_legendre(int n, double a, double b);

QuadratureRule trapezoid(int n, double a, double b);

/// `order` points per axis of the given kind over a compact domain.
QuadratureRule make_rule(const Domain& domain, int order, RuleKind kind = RuleKind::GaussLegendre);

}  // namespace opkern
