#include "opkern/discretize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>

#include "opkern/errors.hpp"

namespace opkern {

BlockOperator::BlockOperator(CMatrix matrix, QuadratureRule rule, int matrix_dim, std::string source)
    : matrix_(std::move(matrix)), rule_(std::move(rule)), matrix_dim_(matrix_dim), source_(std::move(source)) {
    const auto expect = static_cast<Eigen::Index>(rule_.size()) * matrix_dim_;
    if (matrix_.rows() != expect || matrix_.cols() != expect) {
        throw ArgumentError("BlockOperator: matrix shape does not match nodes x matrix_dim");
    }
}

CMatrix BlockOperator::block(std::size_t i, std::size_t j) const {
    const int d = matrix_dim_;
    return matrix_.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d);
}

namespace {

void check_assembly_inputs(const KernelSpec& spec, const QuadratureRule& rule) {
    if (!spec.domain.compact()) throw ArgumentError("assemble: kernel domain is not compact");
    if (!spec.domain.same_as(rule.domain)) {
        throw ArgumentError("assemble: rule domain " + rule.domain.describe() +
                            " does not match kernel domain " + spec.domain.describe());
    }
    if (!spec.evaluator) throw EvaluationError("assemble: kernel has no evaluator");
}

void fill_block(const KernelSpec& spec, const QuadratureRule& rule, std::size_t i, std::size_t j,
                CMatrix& scratch, CMatrix& a) {
    const int d = spec.matrix_dim;
    eval_unchecked(spec, rule.nodes[i], rule.nodes[j], scratch);
    const double s = std::sqrt(rule.weights[i]) * std::sqrt(rule.weights[j]);
    a.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d) = s * scratch;
}

BlockOperator finish(const KernelSpec& spec, const QuadratureRule& rule, CMatrix a) {
    if (!linalg::all_finite(a)) throw EvaluationError("assemble: kernel '" + spec.id + "' produced non-finite values");
    return BlockOperator(std::move(a), rule, spec.matrix_dim, spec.id);
}

}  // namespace

BlockOperator assemble(const KernelSpec& spec, const QuadratureRule& rule) {
    check_assembly_inputs(spec, rule);
    const int d = spec.matrix_dim;
    const long n = static_cast<long>(rule.size());
    CMatrix a(n * d, n * d);

    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel
    {
        CMatrix scratch(d, d);
#pragma omp for schedule(static) collapse(2)
        for (long j = 0; j < n; ++j) {
            for (long i = 0; i < n; ++i) {
                try {
                    fill_block(spec, rule, i, j, scratch, a);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return finish(spec, rule, std::move(a));
}

BlockOperator assemble_serial(const KernelSpec& spec, const QuadratureRule& rule) {
    check_assembly_inputs(spec, rule);
    const int d = spec.matrix_dim;
    const std::size_t n = rule.size();
    CMatrix a(static_cast<Eigen::Index>(n) * d, static_cast<Eigen::Index>(n) * d);
    CMatrix scratch(d, d);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) fill_block(spec, rule, i, j, scratch, a);
    return finish(spec, rule, std::move(a));
}

std::vector<double> top_singular_values(const CMatrix& a, int k) {
    std::vector<double> mu;
    if (linalg::is_hermitian(a, 1e-13)) {
        const auto eig = linalg::hermitian_eig(a, false);
        for (Eigen::Index i = 0; i < eig.values.size(); ++i) mu.push_back(std::abs(eig.values[i]));
        std::sort(mu.begin(), mu.end(), std::greater<>());
    } else {
        const auto s = linalg::svd(a, false);
        mu.assign(s.values.data(), s.values.data() + s.values.size());
    }
    if (static_cast<int>(mu.size()) > k) mu.resize(k);
    return mu;
}

RefineResult refine_until(const KernelSpec& spec, double tol, int k_track, int n0, int n_max,
                          RuleKind kind) {
    if (!(tol > 0.0 && tol < 1.0)) throw ArgumentError("refine_until: tol must lie in (0, 1)");
    if (n0 < 4) throw ArgumentError("refine_until: n0 must be at least 4");
    if (k_track < 1) throw ArgumentError("refine_until: k_track must be positive");
    if (n_max < n0) throw ArgumentError("refine_until: n_max must be >= n0");

    std::vector<RefinementStep> history;
    int order = n0;
    BlockOperator op = assemble(spec, make_rule(spec.domain, order, kind));
    history.push_back({order, top_singular_values(op.matrix(), k_track), 0.0});

    while (true) {
        const int next = order * 2;
        if (next > n_max) {
            throw ConvergenceError("refine_until: order cap " + std::to_string(n_max) +
                                       " reached before singular values converged",
                                   history);
        }
        BlockOperator next_op = assemble(spec, make_rule(spec.domain, next, kind));
        RefinementStep step{next, top_singular_values(next_op.matrix(), k_track), 0.0};
        const auto& prev = history.back().tracked;
        const double top = step.tracked.empty() ? 0.0 : step.tracked.front();
        double change = 0.0;
        for (std::size_t l = 0; l < step.tracked.size(); ++l) {
            const double old = l < prev.size() ? prev[l] : 0.0;
            const double scale = std::max(std::abs(step.tracked[l]), 1e-12 * top);
            if (scale > 0.0) change = std::max(change, std::abs(step.tracked[l] - old) / scale);
        }
        step.max_rel_change = change;
        history.push_back(step);
        order = next;
        op = std::move(next_op);
        if (change < tol) break;
    }
    return {std::move(op), std::move(history)};
}

// ------------------------------------------------------------------ export

namespace {

void put_u64(std::ostream& out, std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof(bits))) {
        throw ArgumentError("block dump truncated");
    }
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return bits;
}

constexpr char kMagic[8] = {'O', 'P', 'K', 'B', 'L', 'K', '0', '1'};

}  // namespace

void write_block_binary(const BlockOperator& op, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put_u64(out, op.nodes());
    put_u64(out, static_cast<std::uint64_t>(op.matrix_dim()));
    put_u64(out, op.rule().kind == RuleKind::GaussLegendre ? 0 : 1);
    const CMatrix& a = op.matrix();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            put_f64(out, a(i, j).real());
            put_f64(out, a(i, j).imag());
        }
    }
}

void write_block_csv(const BlockOperator& op, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << "# n=" << op.nodes() << ",d=" << op.matrix_dim() << ",kind=" << to_string(op.rule().kind)
        << "\n";
    out << std::setprecision(17);
    const CMatrix& a = op.matrix();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << a(i, j).real() << ',' << a(i, j).imag();
        }
        out << '\n';
    }
}

BlockDump read_block_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ArgumentError(path.string() + " is not a block operator dump");
    }
    BlockDump dump;
    dump.nodes = static_cast<std::int64_t>(get_u64(in));
    dump.matrix_dim = static_cast<std::int64_t>(get_u64(in));
    dump.kind = get_u64(in) == 0 ? RuleKind::GaussLegendre : RuleKind::Trapezoid;
    const Eigen::Index n = dump.nodes * dump.matrix_dim;
    dump.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = std::bit_cast<double>(get_u64(in));
            const double im = std::bit_cast<double>(get_u64(in));
            dump.matrix(i, j) = {re, im};
        }
    }
    return dump;
}

}  // namespace opkern
