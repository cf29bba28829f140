#include "opkern/cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "opkern/config.hpp"
#include "opkern/determinant.hpp"
#include "opkern/errors.hpp"
#include "opkern/gallery.hpp"
#include "opkern/realline.hpp"
#include "opkern/report.hpp"

namespace opkern::cli {

using nlohmann::json;
using report::fmt;
using report::number;

std::pair<std::string, double> parse_param(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ArgumentError("--param expects k=v, got '" + kv + "'");
    const std::string value = kv.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw ArgumentError("--param value is not a number: '" + kv + "'");
    return {kv.substr(0, eq), v};
}

std::vector<int> parse_ranks(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int r = 0;
        try {
            r = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || r < 0) throw ArgumentError("bad rank list '" + text + "'");
        out.push_back(r);
    }
    if (out.empty()) throw ArgumentError("empty rank list");
    return out;
}

namespace {

struct Settings {
    KernelSpec kernel;
    json effective;
    std::string hash;
    int order = 0;
    RuleKind kind = RuleKind::GaussLegendre;
    int n0 = 32;
    int n_max = 1024;
    double tol = 1e-5;
    int k_track = 5;
    std::vector<int> ranks{1, 5, 20, 80};
    ZGrid zgrid;
    std::string zgrid_text = "-2:2:5,-2:2:5";
    int bn_max = 6;
    bool require_trace_class = false;
    std::uint64_t seed = 42;
    double zero_radius = 30.0;
    bool compare_truncation = false;
    double truncation_half_width = 40.0;
    int truncation_order = 1600;
};

// Quadrature order keeping the assembled dimension near 1200.
int default_order(const KernelSpec& k) {
    if (k.domain.dim == 2) {
        return std::clamp(static_cast<int>(std::sqrt(1200.0 / k.matrix_dim)), 3, 14);
    }
    return std::clamp(1200 / k.matrix_dim, 4, 200);
}

Settings resolve(const RunConfig& cfg) {
    json doc = json::object();
    std::filesystem::path base;
    if (cfg.config_path) {
        doc = read_json_file(*cfg.config_path);
        base = cfg.config_path->parent_path();
    }
    json kj;
    if (!cfg.gallery.empty()) {
        kj = {{"type", cfg.gallery}};
    } else if (doc.contains("kernel")) {
        kj = doc["kernel"];
    } else if (doc.contains("type")) {
        kj = doc;
    } else {
        throw ArgumentError("no kernel given: pass --gallery ID or a --config with a kernel section");
    }
    for (const auto& [k, v] : cfg.params) kj["params"][k] = v;

    Settings s;
    s.kernel = load_kernel(kj, base);

    const json q = doc.value("quadrature", json::object());
    const json a = doc.value("analysis", json::object());
    s.order = q.value("order", default_order(s.kernel));
    const std::string kind = q.value("kind", "gauss_legendre");
    if (kind == "trapezoid") s.kind = RuleKind::Trapezoid;
    else if (kind != "gauss_legendre") throw ArgumentError("unknown quadrature kind '" + kind + "'");
    s.n0 = q.value("n0", s.n0);
    s.n_max = q.value("n_max", s.n_max);
    s.tol = q.value("tol", s.tol);
    s.k_track = q.value("k_track", s.k_track);
    if (s.order < 1 || s.n0 < 1 || s.n_max < 1 || s.k_track < 1) throw ArgumentError("quadrature orders must be positive");
    if (!(s.tol > 0.0 && s.tol < 1.0)) throw ArgumentError("tol must lie in (0, 1)");

    if (a.contains("ranks")) s.ranks = a["ranks"].get<std::vector<int>>();
    if (cfg.ranks) s.ranks = *cfg.ranks;
    s.zgrid_text = cfg.z_grid.value_or(a.value("z_grid", s.zgrid_text));
    s.zgrid = parse_z_grid(s.zgrid_text);
    s.bn_max = cfg.bn_max.value_or(a.value("bn_max", s.bn_max));
    if (s.bn_max < 0 || s.bn_max > kMaxFredholmOrder) {
        throw ArgumentError("bn-max must lie in [0, " + std::to_string(kMaxFredholmOrder) + "]");
    }
    s.require_trace_class = a.value("require_trace_class", false);
    s.zero_radius = a.value("zero_radius", s.zero_radius);
    s.compare_truncation = a.value("compare_truncation", false);
    s.truncation_half_width = a.value("truncation_half_width", s.truncation_half_width);
    s.truncation_order = a.value("truncation_order", s.truncation_order);
    s.seed = cfg.seed.value_or(doc.value("seed", std::uint64_t{42}));

    s.effective = {
        {"command", cfg.command},
        {"kernel", kj},
        {"quadrature", {{"order", s.order}, {"kind", to_string(s.kind)}, {"n0", s.n0}, {"n_max", s.n_max},
                        {"tol", s.tol}, {"k_track", s.k_track}}},
        {"analysis", {{"ranks", s.ranks}, {"z_grid", s.zgrid_text}, {"bn_max", s.bn_max},
                      {"require_trace_class", s.require_trace_class}, {"zero_radius", s.zero_radius},
                      {"compare_truncation", s.compare_truncation}}},
        {"seed", s.seed},
    };
    s.hash = report::fnv1a_hex(s.effective.dump());
    return s;
}

json header(const Settings& s) {
    return {{"tool", "opkern"}, {"version", kVersion}, {"config_hash", s.hash}, {"config", s.effective},
            {"kernel", s.kernel.id}, {"domain", s.kernel.domain.describe()}, {"matrix_dim", s.kernel.matrix_dim}};
}

json complex_json(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

void require_compact(const KernelSpec& k, const char* cmd) {
    if (!k.domain.compact()) {
        throw DomainError(std::string(cmd) + ": kernel lives on the real line; use the transform command");
    }
}

std::string diagonal_csv(const SpectralData& sd, const DiagonalTrace& dt) {
    std::string out = "node,x0,x1,b1\n";
    for (std::size_t i = 0; i < dt.per_node.size(); ++i) {
        out += std::to_string(i) + ',' + fmt(sd.rule.nodes[i][0]) + ',' + fmt(sd.rule.nodes[i][1]) + ',' +
               fmt(dt.per_node[i]) + '\n';
    }
    return out;
}

json diagonal_json(const DiagonalTrace& dt, bool pairs) {
    json j = {{"sup_b1", number(dt.sup_b1)}, {"min_diag_eigenvalue", number(dt.min_diag_eigenvalue)}};
    if (pairs) j["sup_pairs_b1"] = number(dt.sup_pairs_b1);
    return j;
}

bool pairs_affordable(const SpectralData& sd) {
    const double nodes = static_cast<double>(sd.rule.size());
    return nodes * nodes * std::pow(sd.matrix_dim, 3) <= 2e8;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const Settings& s, report::OutputSet& files, std::ostream& out) {
    require_compact(s.kernel, "analyze");
    const QuadratureRule rule = make_rule(s.kernel.domain, s.order, s.kind);
    const BlockOperator op = assemble(s.kernel, rule);
    const SpectralData sd = decompose(op, true);

    json rep = header(s);
    rep["order"] = s.order;
    rep["dimension"] = op.matrix().rows();
    rep["hermitian"] = sd.hermitian;

    const cplx te = trace_eigs(sd), td = trace_diagonal(s.kernel, rule);
    rep["trace"] = {{"eigs", complex_json(te)}, {"diagonal", complex_json(td)},
                    {"abs_diff", number(std::abs(te - td))},
                    {"agree", std::abs(te - td) <= 1e-6 * (1.0 + std::abs(td))}};
    rep["schatten"] = {{"b1", number(schatten_norm(sd, 1.0))}, {"b2", number(schatten_norm(sd, 2.0))}};

    json verdict;
    bool diagnostic_failure = false;
    try {
        const auto v = trace_class_diagnostic(sd);
        json ladder = json::array();
        for (const auto& [l, sum] : v.partial_sums) ladder.push_back({{"L", l}, {"sum", number(sum)}});
        verdict = {{"verdict", to_string(v.verdict)}, {"fitted_decay", number(v.fitted_decay)},
                   {"fit_residual", number(v.fit_residual)}, {"resolved", v.resolved},
                   {"fit_window", {v.fit_lo, v.fit_hi}}, {"partial_sums", ladder}, {"rationale", v.rationale}};
        diagnostic_failure = s.require_trace_class && v.verdict != Verdict::TraceClassLikely;
    } catch (const EstimationError& e) {
        verdict = {{"verdict", nullptr}, {"error", e.what()}};
        diagnostic_failure = s.require_trace_class;
    }
    verdict["config_hash"] = s.hash;
    verdict["version"] = kVersion;

    const int per_axis = s.kernel.domain.dim == 1 ? 64 : 12;
    const auto grid = uniform_grid(s.kernel.domain, per_axis);
    std::vector<double> lags;
    for (int k = 7; k >= 2; --k) lags.push_back(s.kernel.domain.diameter() * std::ldexp(1.0, -k));
    const auto holder = holder_modulus(s.kernel, grid, lags);
    rep["holder"] = {{"gamma_hat", number(holder.gamma_hat)}, {"c_hat", number(holder.c_hat)},
                     {"residual", number(holder.residual)}, {"above_half", holder.pass_half}};

    const bool pairs = pairs_affordable(sd);
    const auto diag = diagonal_trace_condition(sd, pairs);
    rep["diagonal_b1"] = diagonal_json(diag, pairs);

    std::mt19937_64 rng(s.seed);
    std::uniform_int_distribution<std::size_t> pick(0, rule.size() - 1);
    std::vector<std::pair<std::size_t, std::size_t>> node_pairs;
    for (int t = 0; t < 20; ++t) node_pairs.emplace_back(pick(rng), pick(rng));
    rep["modulus_identity_residual"] = number(modulus_identity_residual(op, sd, node_pairs));
    rep["verdict"] = verdict["verdict"];
    rep["diagnostic_failure"] = diagnostic_failure;

    files.add("spectrum.csv", report::spectrum_csv(sd));
    files.add_json("verdict.json", verdict);
    files.add_json("report.json", rep);
    files.add("diagonal_b1.csv", diagonal_csv(sd, diag));

    out << "trace: eigs " << fmt(te.real()) << " diagonal " << fmt(td.real()) << "\n";
    out << "verdict: " << (verdict["verdict"].is_null() ? std::string("unavailable") : verdict["verdict"].get<std::string>()) << "\n";
    return diagnostic_failure ? kExitDiagnostic : kExitOk;
}

// --------------------------------------------------------------------- det

int cmd_det(const Settings& s, report::OutputSet& files, std::ostream& out) {
    require_compact(s.kernel, "det");
    const QuadratureRule rule = make_rule(s.kernel.domain, s.order, s.kind);
    const BlockOperator op = assemble(s.kernel, rule);
    const SpectralData sd = decompose(op, false);
    const bool via_r2 = op.matrix().rows() <= 2000;

    std::string scan = "re,im,det1_re,det1_im,det2_re,det2_im";
    scan += via_r2 ? ",det2_r2_re,det2_r2_im\n" : "\n";
    for (const cplx z : s.zgrid.points()) {
        const cplx d1 = det1(sd, z), d2 = det2(sd, z);
        scan += fmt(z.real()) + ',' + fmt(z.imag()) + ',' + fmt(d1.real()) + ',' + fmt(d1.imag()) + ',' +
                fmt(d2.real()) + ',' + fmt(d2.imag());
        if (via_r2) {
            const cplx r2 = det2_via_R2(op, z);
            scan += ',' + fmt(r2.real()) + ',' + fmt(r2.imag());
        }
        scan += '\n';
    }

    const auto series = fredholm_series(s.kernel, rule, s.bn_max, false);
    const auto eig = eigen_series(sd, s.bn_max, false, s.kernel.id);

    json rep = header(s);
    rep["order"] = s.order;
    rep["series_method"] = to_string(series.method);
    json orders = json::array();
    for (int n = 0; n <= s.bn_max; ++n) orders.push_back(fredholm_order(rule, n));
    rep["series_points_per_axis"] = orders;
    try {
        const auto g = order_of_growth(series);
        rep["order_of_growth"] = {{"rho_hat", number(g.rho_hat)}, {"rho_raw", number(g.rho_raw)},
                                  {"window", g.window}, {"residual", number(g.residual)}};
    } catch (const EstimationError& e) {
        rep["order_of_growth"] = {{"rho_hat", nullptr}, {"error", e.what()}};
    }
    try {
        const auto v = trace_class_diagnostic(sd);
        rep["verdict"] = to_string(v.verdict);
        if (v.verdict == Verdict::NotTraceClassLikely) {
            rep["warning"] = "singular values do not look summable; det1 is the finite product only";
        }
    } catch (const EstimationError& e) {
        rep["verdict"] = nullptr;
    }
    json zeros = json::array();
    for (const cplx z : det_zeros(sd, s.zero_radius)) zeros.push_back(complex_json(z));
    rep["zeros"] = zeros;
    rep["zero_radius"] = s.zero_radius;

    files.add("det_scan.csv", scan);
    files.add("series.csv", report::series_csv(series));
    files.add("series_eigen.csv", report::series_csv(eig));
    files.add_json("report.json", rep);
    out << "zeros within radius " << fmt(s.zero_radius) << ": " << zeros.size() << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ mercer

json interleaving_trials(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst_match = 0.0, worst_interleave = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int n = 2 + static_cast<int>(rng() % 7);
        std::vector<double> nu(n);
        for (auto& v : nu) v = 3.0 * unif(rng);
        std::sort(nu.begin(), nu.end(), std::greater<>());
        nu.erase(std::unique(nu.begin(), nu.end()), nu.end());
        const int m = static_cast<int>(nu.size());
        Eigen::VectorXd v(m);
        for (int i = 0; i < m; ++i) v[i] = unif(rng);
        std::vector<double> c(m);
        for (int i = 0; i < m; ++i) c[i] = v[i] * v[i];
        const std::vector<int> mult(m, 1);
        const auto mu = secular_rank_one_update(nu, mult, c);
        CMatrix a = CMatrix::Zero(m, m);
        for (int i = 0; i < m; ++i) a(i, i) = nu[i];
        a += (v * v.transpose()).cast<cplx>();
        const auto dense = linalg::hermitian_eig(a, false);
        for (int i = 0; i < m; ++i) {
            worst_match = std::max(worst_match, std::abs(mu[i] - dense.values[m - 1 - i]));
            // ν_{i} ≤ μ_i ≤ ν_{i−1} in descending order, with μ_1 above ν_1
            worst_interleave = std::max(worst_interleave, nu[i] - mu[i]);
            if (i > 0) worst_interleave = std::max(worst_interleave, mu[i] - nu[i - 1]);
        }
    }
    return {{"trials", trials}, {"seed", seed}, {"max_abs_dev_vs_dense", number(worst_match)},
            {"max_interleaving_violation", number(std::max(0.0, worst_interleave))},
            {"pass", worst_match <= 1e-10 && worst_interleave <= 1e-10}};
}

int cmd_mercer(const Settings& s, report::OutputSet& files, std::ostream& out) {
    require_compact(s.kernel, "mercer");
    const QuadratureRule rule = make_rule(s.kernel.domain, s.order, s.kind);
    const BlockOperator op = assemble(s.kernel, rule);
    const SpectralData sd = decompose(op, true);

    json rep = header(s);
    rep["order"] = s.order;
    std::vector<int> ranks;
    for (int r : s.ranks) ranks.push_back(std::min<int>(r, static_cast<int>(sd.singular_values.size())));

    bool psd = true;
    std::string csv = "rank,sup_error\n";
    try {
        const auto err = mercer_sup_error(sd, ranks);
        json table = json::array();
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            csv += std::to_string(ranks[i]) + ',' + fmt(err[i]) + '\n';
            table.push_back({{"rank", ranks[i]}, {"sup_error", number(err[i])}});
        }
        rep["mercer"] = table;
    } catch (const PreconditionError& e) {
        psd = false;
        rep["mercer"] = nullptr;
        rep["psd_failure"] = e.what();
    }
    rep["psd"] = psd;

    const bool pairs = pairs_affordable(sd);
    const auto diag = diagonal_trace_condition(sd, pairs);
    rep["diagonal_b1"] = diagonal_json(diag, pairs);
    rep["interleaving"] = interleaving_trials(s.seed, 100);

    files.add("mercer.csv", csv);
    files.add("diagonal_b1.csv", diagonal_csv(sd, diag));
    files.add_json("report.json", rep);
    out << "psd: " << (psd ? "yes" : "no") << ", sup B1 of P(x,x): " << fmt(diag.sup_b1) << "\n";
    return psd ? kExitOk : kExitDiagnostic;
}

// --------------------------------------------------------------- transform

int cmd_transform(const Settings& s, report::OutputSet& files, std::ostream& out) {
    if (s.kernel.domain.compact()) throw DomainError("transform: kernel must live on the real line");
    TransformOptions opts;
    opts.tol = s.tol;
    opts.k_track = s.k_track;
    opts.n0 = s.n0;
    opts.n_max = s.n_max;
    const auto res = spectrum_via_transform(s.kernel, opts);
    const auto& p = res.decay.params;

    json rep = header(s);
    rep["params"] = {{"alpha", number(p.alpha)}, {"C", number(p.c_decay)}, {"delta", number(p.delta)},
                     {"R", number(p.R)}};
    rep["zero_kernel"] = res.zero_kernel;
    json windows = json::array();
    for (const auto& w : res.decay.windows) {
        windows.push_back({{"lag_lo", number(w.lag_lo)}, {"lag_hi", number(w.lag_hi)}, {"alpha", number(w.alpha)}});
    }
    rep["decay_fit"] = {{"residual", number(res.decay.fit_residual)}, {"pairs", res.decay.pairs_used},
                        {"windows", windows}, {"super_exponential", res.decay.super_exponential},
                        {"derivative_C", number(res.decay.derivative_c)},
                        {"local_lipschitz", number(res.decay.local_lipschitz)}};
    json hist = json::array();
    for (const auto& h : res.history) hist.push_back({{"order", h.order}, {"max_rel_change", number(h.max_rel_change)}});
    rep["refinement"] = hist;

    const KernelSpec tilde = transform_kernel(s.kernel, p);
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::string bcsv = "eps,sup_norm\n";
    bool monotone = true;
    const auto rows = boundary_table(tilde, eps);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bcsv += fmt(rows[i].eps) + ',' + fmt(rows[i].sup_norm) + '\n';
        if (i > 0 && rows[i].sup_norm > rows[i - 1].sup_norm) monotone = false;
    }
    rep["boundary_monotone"] = monotone;

    if (s.compare_truncation) {
        const double L = s.truncation_half_width;
        const KernelSpec box = restrict_to(s.kernel, Domain::interval(-L, L));
        const auto mu = top_singular_values(assemble(box, gauss_legendre(s.truncation_order, -L, L)).matrix(), s.k_track);
        json cmp = json::array();
        for (std::size_t l = 0; l < mu.size() && l < res.spectrum.singular_values.size(); ++l) {
            const double t = res.spectrum.singular_values[l];
            cmp.push_back({{"index", l + 1}, {"transform", number(t)}, {"truncation", number(mu[l])},
                           {"rel_diff", number(std::abs(t - mu[l]) / std::max(mu[l], 1e-300))}});
        }
        rep["truncation_comparison"] = cmp;
    }

    files.add_json("report.json", rep);
    files.add("boundary.csv", bcsv);
    files.add("spectrum.csv", report::spectrum_csv(res.spectrum));
    out << "alpha " << fmt(p.alpha) << " delta " << fmt(p.delta) << "\n";
    return kExitOk;
}

int cmd_gallery(std::ostream& out) {
    for (const auto& e : gallery::list()) {
        out << e.id << "\n  params: " << (e.params.empty() ? "none" : e.params) << "\n  " << e.summary << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        configure_threads();
        if (cfg.command == "gallery") return cmd_gallery(out);
        const Settings s = resolve(cfg);
        report::OutputSet files;
        int code = kExitOk;
        if (cfg.command == "analyze") code = cmd_analyze(s, files, out);
        else if (cfg.command == "det") code = cmd_det(s, files, out);
        else if (cfg.command == "mercer") code = cmd_mercer(s, files, out);
        else if (cfg.command == "transform") code = cmd_transform(s, files, out);
        else throw ArgumentError("unknown command '" + cfg.command + "'");
        files.write_all(cfg.out_dir);
        return code;
    } catch (const std::exception& e) {
        err << "opkern " << cfg.command << ": " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace opkern::cli
