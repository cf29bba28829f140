#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "opkern/errors.hpp"
#include "opkern/kernel.hpp"
#include "opkern/quadrature.hpp"

namespace opkern {

/// Nyström discretization of 𝒦: block (i, j) is sqrt(w_i) K(x_i, x_j) sqrt(w_j).
/// Immutable after construction.
class BlockOperator {
public:
    BlockOperator(CMatrix matrix, QuadratureRule rule, int matrix_dim, std::string source);

    const CMatrix& matrix() const noexcept { return matrix_; }
    const QuadratureRule& rule() const noexcept { return rule_; }
    int matrix_dim() const noexcept { return matrix_dim_; }
    std::size_t nodes() const noexcept { return rule_.size(); }
    const std::string& source() const noexcept { return source_; }

    /// Block (i, j), still in weighted coordinates.
    CMatrix block(std::size_t i, std::size_t j) const;

private:
    CMatrix matrix_;
    QuadratureRule rule_;
    int matrix_dim_;
    std::string source_;
};

/// OpenMP assembly over node pairs.
BlockOperator assemble(const KernelSpec& spec, const QuadratureRule& rule);

/// Single-threaded reference assembly; bitwise identical to assemble().
BlockOperator assemble_serial(const KernelSpec& spec, const QuadratureRule& rule);

struct RefineResult {
    BlockOperator op;
    std::vector<RefinementStep> history;
};

/// Doubles the quadrature order from n0 until the top k_track singular values
/// change by less than tol (relative) between consecutive orders.
RefineResult refine_until(const KernelSpec& spec, double tol, int k_track, int n0, int n_max,
                          RuleKind kind = RuleKind::GaussLegendre);

/// Top-k singular values without vectors (Hermitian fast path).
std::vector<double> top_singular_values(const CMatrix& a, int k);

// Export. Binary layout: "OPKBLK01", int64 n, int64 d, int64 kind, then
// (n d)² complex entries row-major as little-endian float64 (re, im) pairs.
void write_block_binary(const BlockOperator& op, const std::filesystem::path& path);
void write_block_csv(const BlockOperator& op, const std::filesystem::path& path);

struct BlockDump {
    std::int64_t nodes = 0;
    std::int64_t matrix_dim = 0;
    RuleKind kind = RuleKind::GaussLegendre;
    CMatrix matrix;
};

BlockDump read_block_binary(const std::filesystem::path& path);

}  // namespace opkern
