#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opkern/discretize.hpp"

namespace opkern {

/// Singular and eigen structure of a BlockOperator. Vectors are columns in the
/// weighted coordinates; divide block i by sqrt(w_i) for kernel-unit samples.
struct SpectralData {
    std::vector<double> singular_values;  // descending
    std::vector<cplx> eigenvalues;        // descending |λ|
    CMatrix left_vectors;                 // ψ_ℓ; empty when values only
    CMatrix right_vectors;                // φ_ℓ
    CMatrix eigenvectors;                 // Hermitian sources only, matched to eigenvalues
    bool hermitian = false;
    int matrix_dim = 1;
    QuadratureRule rule;

    bool has_vectors() const { return left_vectors.size() > 0 || singular_values.empty(); }
};

SpectralData decompose(const BlockOperator& op, bool want_vectors = true);

double schatten_norm(std::span<const double> mu, double p);
double schatten_norm(const SpectralData& sd, double p);

cplx trace_eigs(const SpectralData& sd);

/// Σ_i w_i Tr K(x_i, x_i).
cplx trace_diagonal(const KernelSpec& spec, const QuadratureRule& rule);

/// P(x_i, x_j) in kernel units, P = (𝒦𝒦*)^{1/2}.
CMatrix symmetrized_kernel(const SpectralData& sd, std::size_t i, std::size_t j);

/// sup over node pairs of ‖P(x,y) − Σ_{ℓ≤r} λ_ℓ φ_ℓ(x) φ_ℓ(y)*‖_F for each r.
std::vector<double> mercer_sup_error(const SpectralData& sd, std::span<const int> ranks);

/// Reference implementation: per-block tail sums without the dense product.
std::vector<double> mercer_sup_error_serial(const SpectralData& sd, std::span<const int> ranks);

struct DiagonalTrace {
    double sup_b1 = 0.0;         // sup over nodes of ‖P(x,x)‖_{B1}
    double sup_pairs_b1 = 0.0;   // sup over node pairs (0 when skipped)
    std::vector<double> per_node;
    double min_diag_eigenvalue = 0.0;  // smallest eigenvalue over all P(x,x)
};

DiagonalTrace diagonal_trace_condition(const SpectralData& sd, bool include_pairs = true);

enum class Verdict { TraceClassLikely, Borderline, NotTraceClassLikely };

const char* to_string(Verdict v);

struct TraceClassVerdict {
    std::vector<std::pair<int, double>> partial_sums;  // (L, Σ_{ℓ≤L} μ_ℓ)
    double fitted_decay = 0.0;  // +inf for numerically finite rank
    double fit_residual = 0.0;
    int resolved = 0;
    int fit_lo = 0;
    int fit_hi = 0;
    Verdict verdict = Verdict::NotTraceClassLikely;
    std::string rationale;
};

TraceClassVerdict trace_class_diagnostic(const SpectralData& sd);

/// Eigenvalues of diag(ν with multiplicity) + v v*, descending. `v_norms_sq`
/// holds the squared norm of v projected on each eigenspace.
std::vector<double> secular_rank_one_update(std::span<const double> eigs, std::span<const int> mults,
                                            std::span<const double> v_norms_sq);

/// Max discrepancy among ∫‖K(x,y)−K(x',y)‖²dy, the same with P, and
/// Σ μ_ℓ²‖ψ_ℓ(x)−ψ_ℓ(x')‖², over node index pairs.
double modulus_identity_residual(const KernelSpec& spec, const QuadratureRule& rule,
                                 std::span<const std::pair<std::size_t, std::size_t>> pairs);

double modulus_identity_residual(const BlockOperator& op, const SpectralData& sd,
                                 std::span<const std::pair<std::size_t, std::size_t>> pairs);

}  // namespace opkern
