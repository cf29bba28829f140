#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "opkern/determinant.hpp"
#include "opkern/errors.hpp"
#include "opkern/gallery.hpp"
#include "oracles.hpp"

using namespace opkern;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralData spectrum_of(const KernelSpec& k, int n, bool vectors = false) {
    return decompose(assemble(k, make_rule(k.domain, n)), vectors);
}

KernelSpec constant_scalar(double c) {
    CMatrix m(1, 1);
    m(0, 0) = c;
    const auto one = [](const Point&) { return 1.0; };
    return gallery::separable(one, one, m, Domain::interval(0, 1), "constant");
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<cplx> grid5() { return ZGrid{}.points(); }

}  // namespace

TEST_CASE("det1 and det2 from eigenvalues") {
    const auto min400 = spectrum_of(gallery::min_kernel(), 400);
    CHECK(det1(min400, 0.0) == cplx(1.0));
    CHECK(det2(min400, 0.0) == cplx(1.0));

    // min kernel: ∏(1 + zλ_k) = cos(√(−z)); the zero at −π²/4 needs n = 800
    // to reach 1e−6 (n = 400 gives 1.7e−6).
    const auto min800 = spectrum_of(gallery::min_kernel(), 800);
    CHECK(std::abs(det1(min800, -kPi * kPi / 4)) <= 1e-6);
    for (cplx z : {cplx(-1.0), cplx(0.5, 0.5), cplx(1.0), cplx(-2.0), cplx(0.0, 1.0)}) {
        CHECK(std::abs(det1(min800, z) - oracle::cos_sqrt(-z)) <= 1e-6);
    }

    const double c = 1.7;
    const auto r1 = spectrum_of(constant_scalar(c), 6);
    for (cplx z : {cplx(0.3), cplx(-2.0, 1.0)}) {
        CHECK(rel(det1(r1, z), 1.0 + z * c) <= 1e-12);
        CHECK(rel(det2(r1, z), (1.0 + z * c) * std::exp(-z * c)) <= 1e-12);
    }

    for (const auto& sd : {min400, r1, spectrum_of(gallery::make("separable", {{"d", 3}}), 20)}) {
        for (cplx z : grid5()) {
            CHECK(rel(det2(sd, z), det1(sd, z) * std::exp(-z * trace_eigs(sd))) <= 1e-10);
        }
    }
}

TEST_CASE("det2_via_R2") {
    const auto op = assemble(gallery::shift_l2(4), gauss_legendre(3, 0, 1));
    const auto sd = decompose(op, false);
    CHECK(det2_via_R2(op, 0.0) == cplx(1.0));
    for (cplx z : {cplx(1.0), cplx(0.0, 1.0), cplx(-2.0), cplx(1.5, -0.5)}) {
        CHECK(std::abs(det2_via_R2(op, z) - 1.0) <= 1e-10);
        CHECK(std::abs(det2(sd, z) - 1.0) <= 1e-10);
    }

    // finite-rank 3x3 constant kernel; oracle: Leibniz determinant of
    // (I + zM)exp(−zM) = det(I + zM) e^{−z tr M}
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = {u(rng), u(rng)};
    const auto one = [](const Point&) { return 1.0; };
    const auto k = gallery::separable(one, one, m, Domain::interval(0, 1), "random3");
    const auto kop = assemble(k, gauss_legendre(2, 0, 1));
    const auto ksd = decompose(kop, false);
    for (cplx z : {cplx(1.0), cplx(0.0, 1.0), cplx(-2.0)}) {
        const CMatrix i_zm = CMatrix::Identity(3, 3) + z * m;
        const cplx want = oracle::leibniz_det(i_zm, 3) * std::exp(-z * m.trace());
        CHECK(rel(det2_via_R2(kop, z), want) <= 1e-10);
        CHECK(rel(det2(ksd, z), want) <= 1e-10);
    }

    const auto big = assemble(gallery::min_kernel(), gauss_legendre(2001, 0, 1));
    CHECK_THROWS_AS(det2_via_R2(big, 1.0), ArgumentError);
}

TEST_CASE("Fredholm coefficients of the min kernel") {
    const auto k = gallery::min_kernel();
    const auto rule = gauss_legendre(64, 0, 1);
    CHECK(fredholm_coeff(k, rule, 0, false) == cplx(1.0));
    CHECK(std::abs(fredholm_coeff(k, rule, 1, false) - trace_diagonal(k, rule)) <= 1e-10);
    CHECK(std::abs(fredholm_coeff(k, rule, 1, false) - 0.5) <= 1e-10);
    CHECK(fredholm_coeff(k, rule, 1, true) == cplx(0.0));
    CHECK(std::abs(fredholm_coeff(k, rule, 2, false) - 1.0 / 24) <= 1e-10);

    // oracle: (1/2)∬ [xy − min(x,y)²] on a fine midpoint grid
    const double fine = 0.5 * oracle::midpoint_average([](double x, double y) {
        const double m = std::min(x, y);
        return x * y - m * m;
    }, 0, 1, 0, 1, 3000);
    CHECK(std::abs(fine - 1.0 / 24) <= 1e-7);

    // cosh(√z) = Σ z^n/(2n)!
    double fact = 2.0;
    for (int n = 2; n <= 5; ++n) {
        fact *= (2 * n - 1) * (2 * n);
        CHECK(std::abs(fredholm_coeff(k, rule, n, false) - 1.0 / fact) <= 1e-12);
    }
    CHECK_THROWS_AS(fredholm_coeff(k, rule, 9, false), ArgumentError);
    CHECK_THROWS_AS(fredholm_coeff(k, gauss_legendre(8, 0, 2), 2, false), ArgumentError);
    CHECK(fredholm_coeff(k, rule, 4, false) == fredholm_coeff_serial(k, rule, 4, false));
}

TEST_CASE("multi-index determinant matches direct summation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int d : {1, 2, 3}) {
        for (int n : {1, 2, 3, 4}) {
            CMatrix b(n * d, n * d);
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = {u(rng), u(rng)};
            for (bool modified : {false, true}) {
                const cplx want = oracle::multi_index_sum(b, n, d, modified);
                CHECK(std::abs(multi_index_determinant(b, n, d, modified) - want) <= 1e-10 * std::max(1.0, std::abs(want)));
            }
        }
    }
}

TEST_CASE("matrix-valued coefficients against a full-cube oracle") {
    // smooth 2x2 kernel: the simplex rule and a cube sum of the literal
    // multi-index integrand both converge spectrally
    const auto k = gallery::semi_separable(0.5, gallery::hilbert_matrix(2), Domain::interval(0, 1));
    const auto g = gallery::make("separable", {{"d", 2}});
    for (const auto& ker : {k, g}) {
        const auto rule = gauss_legendre(24, 0, 1);
        for (int n : {2, 3}) {
            for (bool modified : {false, true}) {
                // semi_separable has a kink on the diagonal, which limits the cube oracle
                const bool smooth = ker.id != k.id;
                const int q = smooth ? 14 : 24;
                const auto cube = gauss_legendre(q, 0, 1);
                cplx sum = 0.0;
                std::vector<int> idx(n, 0);
                while (true) {
                    CMatrix b(2 * n, 2 * n);
                    double w = 1.0;
                    for (int a = 0; a < n; ++a) {
                        w *= cube.weights[idx[a]];
                        for (int c = 0; c < n; ++c) b.block(2 * a, 2 * c, 2, 2) = eval_kernel(ker, cube.nodes[idx[a]], cube.nodes[idx[c]]);
                    }
                    sum += w * oracle::multi_index_sum(b, n, 2, modified);
                    int pos = 0;
                    while (pos < n && ++idx[pos] == q) idx[pos++] = 0;
                    if (pos == n) break;
                }
                sum /= n == 2 ? 2.0 : 6.0;
                const cplx got = fredholm_coeff(ker, rule, n, modified);
                CHECK(std::abs(got - sum) <= (smooth ? 1e-10 : 1e-3) * std::max(1.0, std::abs(sum)));
            }
        }
    }
}

TEST_CASE("series evaluation") {
    const auto k = gallery::min_kernel();
    const auto series = fredholm_series(k, gauss_legendre(64, 0, 1), 6, false);
    CHECK(series.coeffs[0] == cplx(1.0));
    CHECK(series_eval(series, 0.0).value == cplx(1.0));
    const auto sd = spectrum_of(k, 400);
    for (cplx z : {cplx(1.0), cplx(-1.0), cplx(0.0, 1.0), cplx(0.6, -0.8)}) {
        const auto v = series_eval(series, z);
        CHECK(std::abs(v.value - det1(sd, z)) <= 1e-5);
        CHECK(v.truncation_estimate <= 1e-8);
    }

    const auto sh = fredholm_series(gallery::shift_l2(4), gauss_legendre(4, 0, 1), 5, true);
    for (cplx z : {cplx(2.0), cplx(-2.0), cplx(0.0, 2.0), cplx(1.2, 1.2)}) {
        CHECK(std::abs(series_eval(sh, z).value - 1.0) <= 1e-8);
    }

    // eigen-derived coefficients: with N ≥ rank the series is det1 itself
    const auto r = spectrum_of(gallery::make("rank_one", {{"d", 3}}), 10);
    const auto es = eigen_series(r, 8, false);
    for (cplx z : {cplx(0.7), cplx(-1.3, 0.4)}) CHECK(rel(series_eval(es, z).value, det1(r, z)) <= 1e-12);
    const auto fs = fredholm_series(gallery::make("rank_one", {{"d", 3}}), gauss_legendre(10, 0, 1), 3, false);
    for (int n = 0; n <= 3; ++n) CHECK(std::abs(fs.coeffs[n] - es.coeffs[n]) <= 1e-9 * std::max(1.0, std::abs(es.coeffs[n])));
}

TEST_CASE("order of growth") {
    DeterminantSeries a, b, printed, corrected;
    double f = 1.0;
    const double gamma = 0.75;
    for (int n = 0; n <= 8; ++n) {
        if (n > 0) f *= n;
        a.coeffs.emplace_back(1.0 / (f * f));
        b.coeffs.emplace_back(1.0 / f);
        printed.coeffs.emplace_back(n == 0 ? 1.0 : std::pow(n, -gamma + 0.5) / f);
        corrected.coeffs.emplace_back(n == 0 ? 1.0 : std::pow(n, n * (0.5 - gamma)) / f);
    }
    CHECK(std::abs(order_of_growth(a).rho_hat - 0.5) <= 0.1);
    CHECK(std::abs(order_of_growth(b).rho_hat - 1.0) <= 0.1);
    // The bound as printed, C^n n^{−γ+1/2}/n!, has order exactly 1; the
    // Hadamard-type bound with n^{n(1/2−γ)} has order 1/(γ + 1/2).
    CHECK(std::abs(order_of_growth(printed).rho_hat - 1.0) <= 0.1);
    const auto g = order_of_growth(corrected);
    CHECK(g.rho_hat < 1.0);
    CHECK(std::abs(g.rho_hat - 1.0 / (gamma + 0.5)) <= 0.1);
    CHECK(g.window.front() >= 1);

    DeterminantSeries big;
    for (int n = 0; n <= 8; ++n) big.coeffs.emplace_back(2.0);
    CHECK_THROWS_AS(order_of_growth(big), EstimationError);
    DeterminantSeries short_series;
    short_series.coeffs = {1.0, 0.5, 0.1};
    CHECK_THROWS_AS(order_of_growth(short_series), EstimationError);
}

TEST_CASE("determinant zeros") {
    const auto sd = spectrum_of(gallery::min_kernel(), 400);
    const auto zs = det_zeros(sd, 30.0);
    REQUIRE(zs.size() == 2);
    CHECK(std::abs(zs[0] - (-kPi * kPi / 4)) <= 1e-4);
    for (cplx z : zs) {
        double scale = 1.0;
        for (const auto& l : sd.eigenvalues) scale *= 1.0 + std::abs(z) * std::abs(l);
        CHECK(std::abs(det1(sd, z)) <= 1e-6 * std::max(1.0, scale));
    }
    CHECK(det_zeros(spectrum_of(gallery::shift_l2(4), 3), 30.0).empty());
    const auto two = det_zeros(spectrum_of(constant_scalar(2.0), 4), 10.0);
    REQUIRE(two.size() == 1);
    CHECK(std::abs(two[0] + 0.5) <= 1e-14);
    CHECK_THROWS_AS(det_zeros(sd, 0.0), ArgumentError);
}

TEST_CASE("z-grid parsing") {
    const auto g = parse_z_grid("-1:1:3,0:2:2");
    const auto pts = g.points();
    REQUIRE(pts.size() == 6);
    CHECK(pts.front() == cplx(-1.0, 0.0));
    CHECK(pts.back() == cplx(1.0, 2.0));
    CHECK_THROWS_AS(parse_z_grid("1:2"), ArgumentError);
    CHECK_THROWS_AS(parse_z_grid("0:1:0,0:1:2"), ArgumentError);
}
