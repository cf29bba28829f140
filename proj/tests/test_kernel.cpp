#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "opkern/config.hpp"
#include "opkern/errors.hpp"
#include "opkern/gallery.hpp"
#include "opkern/kernel.hpp"
#include "oracles.hpp"

using namespace opkern;

namespace {

KernelSpec scalar_kernel(std::string id, std::function<cplx(double, double)> f) {
    KernelSpec k;
    k.id = std::move(id);
    k.domain = Domain::interval(0.0, 1.0);
    k.evaluator = [f](const Point& x, const Point& y, MatrixRef out) { out(0, 0) = f(x[0], y[0]); };
    return k;
}

KernelSpec random_kernel(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix a(d, d), b(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            a(i, j) = {u(rng), u(rng)};
            b(i, j) = {u(rng), u(rng)};
        }
    KernelSpec k;
    k.id = "random";
    k.domain = Domain::interval(0.0, 1.0);
    k.matrix_dim = d;
    k.evaluator = [a, b](const Point& x, const Point& y, MatrixRef out) {
        out = std::cos(3 * x[0] - y[0]) * a + std::exp(x[0] * y[0]) * b;
    };
    return k;
}

std::vector<double> lag_ladder(double top, int count) {
    std::vector<double> lags;
    for (int k = 0; k < count; ++k) lags.push_back(top * std::ldexp(1.0, -k));
    return lags;
}

}  // namespace

TEST_CASE("eval_kernel on gallery examples") {
    const auto c = gallery::constant_l2(4);
    const CMatrix v = eval_kernel(c, at(0.2), at(0.9));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(v(i, j) == cplx(i == j ? 1.0 / (i + 1) : 0.0));

    CHECK(eval_kernel(gallery::min_kernel(), at(0.3), at(0.7))(0, 0).real() == 0.3);

    const CMatrix s = eval_kernel(gallery::shift_l2(4), at(0.5), at(0.1));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(s(i, j) == cplx(j == i + 1 ? 1.0 / (i + 1) : 0.0));
}

TEST_CASE("eval_kernel errors") {
    CHECK_THROWS_AS(eval_kernel(gallery::min_kernel(), at(1.5), at(0.2)), DomainError);
    auto bad = scalar_kernel("bad", [](double, double) -> cplx { throw std::runtime_error("boom"); });
    CHECK_THROWS_AS(eval_kernel(bad, at(0.1), at(0.2)), EvaluationError);
    auto nan = scalar_kernel("nan", [](double, double) { return cplx(std::nan("")); });
    CHECK_THROWS_AS(eval_kernel(nan, at(0.1), at(0.2)), EvaluationError);
}

TEST_CASE("evaluators are deterministic and Hermitian gallery kernels are symmetric") {
    std::vector<KernelSpec> hermitian{gallery::min_kernel(), gallery::brownian_bridge(), gallery::constant_l2(5),
                                      gallery::make("semi_separable", {{"d", 3}, {"offdiag", 0.3}}),
                                      gallery::make("rank_one", {{"d", 3}}), gallery::abs_power(0.4)};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& k : hermitian) {
        REQUIRE(k.meta.hermitian);
        for (int t = 0; t < 25; ++t) {
            const Point x = at(u(rng)), y = at(u(rng));
            const CMatrix kxy = eval_kernel(k, x, y);
            CHECK((kxy - eval_kernel(k, x, y)).norm() == 0.0);
            CHECK((kxy - eval_kernel(k, y, x).adjoint()).norm() <= 1e-14);
        }
    }
}

TEST_CASE("holder_modulus recovers known exponents") {
    const auto grid = uniform_grid(Domain::interval(0.0, 1.0), 256);
    const auto lags = lag_ladder(0.25, 6);

    const auto p = holder_modulus(gallery::abs_power(0.75), grid, lags);
    CHECK(p.gamma_hat == doctest::Approx(0.75).epsilon(0.05 / 0.75));
    CHECK(p.pass_half);

    const auto m = holder_modulus(gallery::min_kernel(), grid, lags);
    CHECK(std::abs(m.gamma_hat - 1.0) <= 0.05);

    const auto c = holder_modulus(gallery::constant_l2(4), uniform_grid(Domain::interval(0.0, 1.0), 16), lags);
    CHECK(c.gamma_hat == 1.0);
    CHECK(c.c_hat <= 1e-12);

    // oracle: direct sup of |K(x+h,y) − K(x,y)| over the same 256-node grid
    const double h = lags[2];
    double sup = 0.0;
    for (const auto& x : grid)
        for (const auto& y : grid)
            if (x[0] + h <= 1.0) sup = std::max(sup, std::abs(std::pow(std::abs(x[0] + h - y[0]), 0.75) - std::pow(std::abs(x[0] - y[0]), 0.75)));
    CHECK(p.sup_modulus[2] == doctest::Approx(sup).epsilon(1e-12));
}

TEST_CASE("holder_modulus on a box and its errors") {
    const Domain box = Domain::box(0, 1, 0, 1);
    const auto k = gallery::semi_separable(1.0, CMatrix::Identity(1, 1), box);
    const auto r = holder_modulus(k, uniform_grid(box, 10), lag_ladder(0.2, 4));
    CHECK(r.gamma_hat >= 0.95);

    const auto grid = uniform_grid(Domain::interval(0.0, 1.0), 32);
    const std::vector<double> same{0.1, 0.1, 0.1};
    CHECK_THROWS_AS(holder_modulus(gallery::min_kernel(), grid, same), EstimationError);
    const std::vector<double> negative{-0.1, 0.2};
    CHECK_THROWS_AS(holder_modulus(gallery::min_kernel(), grid, negative), ArgumentError);
    CHECK_THROWS_AS(holder_modulus(gallery::min_kernel(), std::span(grid).first(4), lag_ladder(0.2, 3)), ArgumentError);
}

TEST_CASE("local averages") {
    const auto c = gallery::constant_l2(4);
    const CMatrix avg = local_average(c, 0.3, at(0.5), at(0.1), 8);
    CHECK((avg - eval_kernel(c, at(0.5), at(0.5))).norm() <= 1e-14);

    const auto affine = scalar_kernel("affine", [](double x, double y) { return cplx(x + y); });
    CHECK(std::abs(local_average(affine, 0.05, at(0.4), at(0.6), 8)(0, 0) - 1.0) <= 1e-10);

    // clipped near the boundary: oracle averages over the clipped product
    const auto mk = gallery::min_kernel();
    const double clipped = oracle::midpoint_average([](double x, double y) { return std::min(x, y); }, 0.75, 1.0, 0.75, 1.0, 2000);
    CHECK(std::abs(local_average(mk, 0.25, at(1.0), at(1.0), 256)(0, 0).real() - clipped) <= 1e-6);

    // convergence to K(x,y) for |x − y|^0.75 as r shrinks
    const auto pw = gallery::abs_power(0.75);
    const double exact = std::pow(0.2, 0.75);
    double prev = 1.0;
    for (double r : {0.04, 0.02, 0.01}) {
        const double err = std::abs(local_average(pw, r, at(0.3), at(0.5), 32)(0, 0).real() - exact);
        CHECK(err <= prev);
        CHECK(err <= 2.0 * std::pow(r, 0.75));
        prev = err;
    }

    CHECK_THROWS_AS(local_average(mk, 0.0, at(0.5), at(0.5), 8), ArgumentError);
    CHECK_THROWS_AS(local_average(mk, 0.1, at(3.0), at(0.5), 8), DomainError);
}

TEST_CASE("maximal function") {
    const auto c = gallery::constant_l2(4);
    const std::vector<double> radii{0.1, 0.2};
    CHECK(maximal_function(c, radii, at(0.5), at(0.5), 2) ==
          doctest::Approx(std::sqrt(1 + 1.0 / 4 + 1.0 / 9 + 1.0 / 16)).epsilon(1e-14));
    CHECK(maximal_function(c, radii, at(0.5), at(0.5), 1) == doctest::Approx(25.0 / 12).epsilon(1e-14));

    const auto mk = gallery::min_kernel();
    const std::vector<double> rs{0.125, 0.25, 0.5};
    double want = 0.0;
    for (double r : rs) {
        want = std::max(want, oracle::midpoint_average([](double x, double y) { return std::min(x, y); },
                                                       1.0 - r, 1.0, 1.0 - r, 1.0, 4000));
    }
    CHECK(std::abs(maximal_function(mk, rs, at(1.0), at(1.0), 2, 256) - want) <= 1e-6);

    // adding radii never decreases the value
    const std::vector<double> fewer{0.25};
    CHECK(maximal_function(mk, rs, at(0.3), at(0.6), 1) >= maximal_function(mk, fewer, at(0.3), at(0.6), 1));
    CHECK_THROWS_AS(maximal_function(mk, rs, at(0.3), at(0.6), 3), ArgumentError);
}

TEST_CASE("hermitian_split") {
    const auto mk = gallery::min_kernel();
    const auto split = hermitian_split(mk);
    for (double x : {0.1, 0.5, 0.9}) {
        CHECK(std::abs(eval_kernel(split.hermitian, at(x), at(0.4))(0, 0) - eval_kernel(mk, at(x), at(0.4))(0, 0)) <= 1e-14);
        CHECK(std::abs(eval_kernel(split.skew_hermitian, at(x), at(0.4))(0, 0)) <= 1e-14);
    }

    const auto sh = hermitian_split(gallery::shift_l2(3)).hermitian;
    const CMatrix h = eval_kernel(sh, at(0.2), at(0.7));
    CHECK(std::abs(h(0, 1) - 0.5) <= 1e-15);
    CHECK(std::abs(h(1, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(h(1, 2) - 0.25) <= 1e-15);
    CHECK(std::abs(h(2, 1) - 0.25) <= 1e-15);

    const auto rk = random_kernel(2, 11);
    const auto rs = hermitian_split(rk);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 25; ++t) {
        const Point x = at(u(rng)), y = at(u(rng));
        const CMatrix hh = eval_kernel(rs.hermitian, x, y), ss = eval_kernel(rs.skew_hermitian, x, y);
        CHECK((hh - cplx(0, 1) * ss - eval_kernel(rk, x, y)).norm() <= 1e-14);
        CHECK((hh - eval_kernel(rs.hermitian, y, x).adjoint()).norm() <= 1e-14);
        CHECK((ss - eval_kernel(rs.skew_hermitian, y, x).adjoint()).norm() <= 1e-14);
    }
    // idempotent on H
    const auto again = hermitian_split(rs.hermitian);
    CHECK((eval_kernel(again.hermitian, at(0.2), at(0.6)) - eval_kernel(rs.hermitian, at(0.2), at(0.6))).norm() <= 1e-15);
    CHECK(eval_kernel(again.skew_hermitian, at(0.2), at(0.6)).norm() <= 1e-15);
}

TEST_CASE("grid kernels interpolate and reject points outside the hull") {
    const int pts = 5, d = 1;
    std::vector<double> samples;
    for (int i = 0; i < pts; ++i)
        for (int j = 0; j < pts; ++j) samples.push_back(i * 0.25 + 2 * j * 0.25);  // x + 2y is bilinear-exact
    const auto g = grid_kernel("grid", Domain::interval(0, 1), pts, d, samples);
    CHECK(eval_kernel(g, at(0.3), at(0.6))(0, 0).real() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK_THROWS_AS(eval_kernel(g, at(1.2), at(0.6)), DomainError);
    CHECK_THROWS_AS(grid_kernel("bad", Domain::interval(0, 1), pts, d, std::vector<double>(3)), ArgumentError);
}

TEST_CASE("kernel configs load gallery and grid kernels") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "opkern_test_kernel";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "g.csv");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out << (i == j ? 1.0 : 0.5) << (j < 2 ? "," : "\n");
    }
    const auto j = nlohmann::json::parse(R"({"type": "grid", "name": "g", "grid_file": "g.csv", "grid_points": 3,
        "domain": {"kind": "interval", "bounds": [[0, 2]]}, "matrix_dim": 1})");
    const auto g = load_kernel(j, dir);
    CHECK(eval_kernel(g, at(1.0), at(1.0))(0, 0).real() == doctest::Approx(1.0));
    CHECK(eval_kernel(g, at(0.5), at(0.0))(0, 0).real() == doctest::Approx(0.75));

    const auto c = load_kernel(nlohmann::json::parse(R"({"type": "constant_l2", "matrix_dim": 3})"));
    CHECK(c.matrix_dim == 3);
    CHECK_THROWS_AS(load_kernel(nlohmann::json::parse(R"({"type": "no_such_kernel"})")), ArgumentError);
    CHECK_THROWS_AS(read_json_file(dir / "missing.json"), ArgumentError);
    fs::remove_all(dir);
}
