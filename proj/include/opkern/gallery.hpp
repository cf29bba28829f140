#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opkern/kernel.hpp"

namespace opkern::gallery {

/// min(x, y) on [0, 1]; eigenvalues 4/((2k-1)²π²).
KernelSpec min_kernel();

/// min(x, y) − xy on [0, 1]; eigenvalues 1/(k²π²).
KernelSpec brownian_bridge();

/// Constant diag(1, 1/2, …, 1/d) on [0, 1]: the ℓ₂ truncation of an operator
/// with μ_n = 1/n.
KernelSpec constant_l2(int d);

/// Constant kernel with 1/n at (n, n+1): nilpotent, singular values 1/n.
KernelSpec shift_l2(int d);

/// e^{−α|x−y|}·M. On boxes |x−y| is the Euclidean distance.
KernelSpec semi_separable(double alpha, const CMatrix& m, const Domain& domain);

/// g(x) h(y) M with real scalar profiles.
KernelSpec separable(std::function<double(const Point&)> g, std::function<double(const Point&)> h,
                     const CMatrix& m, const Domain& domain, std::string id = "separable");

/// g(x) g(y) M.
KernelSpec rank_one(std::function<double(const Point&)> g, const CMatrix& m, const Domain& domain);

/// |x − y|^γ on [0, 1].
KernelSpec abs_power(double gamma);

/// e^{−(x−y)²}.
KernelSpec gaussian(const Domain& domain);

/// sech(x) e^{−α|x−y|} sech(y) on the real line, the shape of a
/// Birman-Schwinger kernel for a sech² potential.
KernelSpec birman_schwinger(double alpha);

KernelSpec zero(int d, const Domain& domain);

/// Hilbert-type Hermitian positive definite matrix 1/(i+j+1).
CMatrix hilbert_matrix(int d);

/// Upper-triangular non-normal matrix 1/(1+j−i) for j ≥ i.
CMatrix upper_triangular_matrix(int d);

struct Entry {
    std::string id;
    std::string params;
    std::string summary;
};

std::vector<Entry> list();

/// Builds a gallery kernel by id. `domain` overrides the default domain where
/// the kernel allows it.
KernelSpec make(const std::string& id, const std::map<std::string, double>& params,
                const std::optional<Domain>& domain = std::nullopt);

}  // namespace opkern::gallery
