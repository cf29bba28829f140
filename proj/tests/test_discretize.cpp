#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "opkern/discretize.hpp"
#include "opkern/errors.hpp"
#include "opkern/gallery.hpp"
#include "opkern/quadrature.hpp"
#include "oracles.hpp"

using namespace opkern;

TEST_CASE("gauss_legendre small rules") {
    const auto r1 = gauss_legendre(1, 0.0, 2.0);
    REQUIRE(r1.size() == 1);
    CHECK(r1.nodes[0][0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

    const auto r2 = gauss_legendre(2, -1.0, 1.0);
    std::vector<double> x, w;
    oracle::gauss_by_bisection(2, x, w);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(r2.nodes[i][0] - x[i]) <= 1e-15);
        CHECK(std::abs(r2.weights[i] - w[i]) <= 1e-14);
    }
    CHECK(std::abs(r2.nodes[1][0] - 1.0 / std::sqrt(3.0)) <= 1e-15);
}

TEST_CASE("gauss_legendre matches the bisection oracle and integrates polynomials") {
    for (int n : {5, 16, 37, 100}) {
        std::vector<double> x, w;
        oracle::gauss_by_bisection(n, x, w);
        const auto r = gauss_legendre(n, -1.0, 1.0);
        REQUIRE(x.size() == static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(r.nodes[i][0] - x[i]) <= 1e-13);
            CHECK(std::abs(r.weights[i] - w[i]) <= 1e-12);
        }
        const auto ab = gauss_legendre(n, -0.5, 2.5);
        double sum = 0.0, poly = 0.0;
        for (std::size_t i = 0; i < ab.size(); ++i) {
            CHECK(ab.weights[i] > 0.0);
            CHECK(ab.nodes[i][0] > -0.5);
            CHECK(ab.nodes[i][0] < 2.5);
            sum += ab.weights[i];
            poly += ab.weights[i] * std::pow(ab.nodes[i][0], 2 * n - 1);
        }
        CHECK(std::abs(sum - 3.0) <= 1e-13);
        const double exact = (std::pow(2.5, 2 * n) - std::pow(-0.5, 2 * n)) / (2 * n);
        CHECK(std::abs(poly - exact) <= 1e-12 * std::abs(exact));
    }
}

TEST_CASE("quadrature argument errors and box rules") {
    CHECK_THROWS_AS(gauss_legendre(0, 0, 1), ArgumentError);
    CHECK_THROWS_AS(gauss_legendre(3, 1, 1), ArgumentError);
    CHECK_THROWS_AS(trapezoid(1, 0, 1), ArgumentError);
    CHECK_THROWS_AS(make_rule(Domain::real_line(), 8), DomainError);

    const auto box = make_rule(Domain::box(0, 2, -1, 1), 7);
    CHECK(box.size() == 49);
    double sum = 0.0;
    for (double w : box.weights) sum += w;
    CHECK(std::abs(sum - 4.0) <= 1e-12);

    const auto t = trapezoid(11, 0, 1);
    double ts = 0.0;
    for (double w : t.weights) ts += w;
    CHECK(std::abs(ts - 1.0) <= 1e-14);
}

TEST_CASE("assemble: constant, zero and min kernels") {
    const auto c = assemble(gallery::constant_l2(3), gauss_legendre(2, 0, 1));
    REQUIRE(c.matrix().rows() == 6);
    const Eigen::VectorXd sv = oracle::singular_values(c.matrix());
    CHECK(std::abs(sv[0] - 1.0) <= 1e-14);
    CHECK(std::abs(sv[1] - 0.5) <= 1e-14);
    CHECK(std::abs(sv[2] - 1.0 / 3) <= 1e-14);
    for (int i = 3; i < 6; ++i) CHECK(sv[i] <= 1e-15);

    const auto z = assemble(gallery::zero(2, Domain::interval(0, 1)), gauss_legendre(5, 0, 1));
    CHECK(z.matrix().norm() == 0.0);

    const auto m = assemble(gallery::min_kernel(), gauss_legendre(200, 0, 1));
    const double top = oracle::singular_values(m.matrix())[0];
    CHECK(std::abs(top - oracle::min_kernel_eigenvalue(1)) <= 1e-4 * oracle::min_kernel_eigenvalue(1));

    CHECK_THROWS_AS(assemble(gallery::min_kernel(), gauss_legendre(5, 0, 2)), ArgumentError);
}

TEST_CASE("parallel and serial assembly agree bitwise") {
    const auto k = gallery::make("separable", {{"d", 3}});
    const auto rule = gauss_legendre(40, 0, 1);
    CHECK(assemble(k, rule).matrix() == assemble_serial(k, rule).matrix());
    const Domain box = Domain::box(0, 1, 0, 1);
    const auto kb = gallery::semi_separable(0.7, gallery::hilbert_matrix(2), box);
    const auto rb = make_rule(box, 6);
    CHECK(assemble(kb, rb).matrix() == assemble_serial(kb, rb).matrix());
}

TEST_CASE("Hermitian and skew parts assemble to (skew-)Hermitian matrices") {
    const auto rule = gauss_legendre(30, 0, 1);
    for (const auto& k : {gallery::min_kernel(), gallery::make("semi_separable", {{"d", 3}, {"offdiag", 0.2}}),
                          gallery::make("rank_one", {{"d", 2}})}) {
        const CMatrix a = assemble(k, rule).matrix();
        CHECK((a - a.adjoint()).norm() <= 1e-13 * a.norm());
    }
    const auto split = hermitian_split(gallery::make("separable", {{"d", 3}}));
    const CMatrix s = assemble(split.skew_hermitian, rule).matrix();
    CHECK((s - s.adjoint()).norm() <= 1e-13 * s.norm());
    const CMatrix skew = cplx(0, -1) * s;  // block matrix of ½(K − K(y,x)*)
    CHECK((skew + skew.adjoint()).norm() <= 1e-13 * skew.norm());
}

TEST_CASE("Frobenius norm matches the kernel L2 norm") {
    // rank_one: e^{x+y} H with the 2x2 Hilbert matrix; ∬ e^{2x+2y} = ((e²−1)/2)²
    const auto k = gallery::make("rank_one", {{"d", 2}});
    const double e2 = (std::exp(2.0) - 1.0) / 2.0;
    const double exact = e2 * gallery::hilbert_matrix(2).norm();
    const double got = assemble(k, gauss_legendre(200, 0, 1)).matrix().norm();
    CHECK(std::abs(got - exact) <= 1e-6 * exact);

    const auto g = gallery::gaussian(Domain::interval(0, 1));
    // ∬ e^{−2(x−y)²} on [0,1]² = √(π/2) erf(√2) + (e^{−2} − 1)/2
    const double ge = std::sqrt(std::sqrt(std::numbers::pi / 2) * std::erf(std::sqrt(2.0)) + (std::exp(-2.0) - 1.0) / 2.0);
    CHECK(std::abs(assemble(g, gauss_legendre(200, 0, 1)).matrix().norm() - ge) <= 1e-6 * ge);
}

TEST_CASE("refine_until") {
    // min kernel: converges; top 5 singular values match 4/((2k−1)²π²)
    const auto r = refine_until(gallery::min_kernel(), 1e-5, 5, 100, 3200);
    CHECK(r.history.size() >= 2);
    const auto mu = top_singular_values(r.op.matrix(), 5);
    for (int k = 1; k <= 5; ++k) {
        CHECK(std::abs(mu[k - 1] - oracle::min_kernel_eigenvalue(k)) <= 1e-5 * oracle::min_kernel_eigenvalue(k));
    }
    // doubling never increases the tracked error
    for (int k = 1; k <= 5; ++k) {
        const double exact = oracle::min_kernel_eigenvalue(k);
        for (std::size_t s = 1; s < r.history.size(); ++s) {
            CHECK(std::abs(r.history[s].tracked[k - 1] - exact) <= std::abs(r.history[s - 1].tracked[k - 1] - exact) + 1e-8);
        }
    }

    const auto c = refine_until(gallery::constant_l2(6), 1e-8, 4, 8, 64);
    CHECK(c.history.size() == 2);

    // |x−y|^0.6 converges like n^{−1.6}: the top value settles within 512
    // nodes, the fifth only near 4096.
    const auto p = refine_until(gallery::abs_power(0.6), 1e-4, 1, 16, 512);
    CHECK(p.op.nodes() <= 512);
    CHECK_THROWS_AS(refine_until(gallery::abs_power(0.6), 1e-4, 5, 16, 512), ConvergenceError);

    try {
        refine_until(gallery::min_kernel(), 1e-9, 5, 8, 64);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.history().size() == 4);
        CHECK(e.history().back().order == 64);
    }
    CHECK_THROWS_AS(refine_until(gallery::min_kernel(), 0.0, 5, 8, 64), ArgumentError);
    CHECK_THROWS_AS(refine_until(gallery::min_kernel(), 1e-3, 5, 2, 64), ArgumentError);
}

TEST_CASE("block operator export round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "opkern_test_discretize";
    fs::create_directories(dir);
    const auto op = assemble(gallery::make("separable", {{"d", 2}}), gauss_legendre(5, 0, 1));
    write_block_binary(op, dir / "a.bin");
    CHECK(fs::file_size(dir / "a.bin") == 8 + 3 * 8 + 10 * 10 * 16);
    const auto back = read_block_binary(dir / "a.bin");
    CHECK(back.nodes == 5);
    CHECK(back.matrix_dim == 2);
    CHECK(back.kind == RuleKind::GaussLegendre);
    CHECK(back.matrix == op.matrix());

    write_block_csv(op, dir / "a.csv");
    std::ifstream in(dir / "a.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "# n=5,d=2,kind=gauss_legendre");

    {
        std::ofstream junk(dir / "junk.bin");
        junk << "not a dump";
    }
    CHECK_THROWS_AS(read_block_binary(dir / "junk.bin"), ArgumentError);
    fs::remove_all(dir);
}
