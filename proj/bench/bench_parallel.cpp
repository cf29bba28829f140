// Serial reference vs OpenMP kernels: assembly, Fredholm coefficients, Mercer
// sup error. Prints wall times and checks the results agree.
#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "opkern/determinant.hpp"
#include "opkern/gallery.hpp"
#include "opkern/spectral.hpp"

namespace {

double seconds(const std::function<void()>& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s serial %8.4f s  parallel %8.4f s  speedup %5.2f  %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    using namespace opkern;
    std::printf("threads: %d\n", configure_threads());

    const auto m = gallery::hilbert_matrix(3);
    const KernelSpec semi = gallery::semi_separable(0.9, m, Domain::interval(0.0, 1.0));
    const QuadratureRule rule = gauss_legendre(300, 0.0, 1.0);
    {
        CMatrix a, b;
        const double ts = seconds([&] { a = assemble_serial(semi, rule).matrix(); });
        const double tp = seconds([&] { b = assemble(semi, rule).matrix(); });
        row("assemble (n=300, d=3)", ts, tp, a == b);
    }
    {
        const KernelSpec k = gallery::min_kernel();
        const QuadratureRule r = gauss_legendre(16, 0.0, 1.0);
        cplx a, b;
        const double ts = seconds([&] { a = fredholm_coeff_serial(k, r, 5, false); }, 1);
        const double tp = seconds([&] { b = fredholm_coeff(k, r, 5, false); }, 1);
        row("fredholm b5 (q=16)", ts, tp, a == b);
    }
    {
        const KernelSpec k = gallery::min_kernel();
        const SpectralData sd = decompose(assemble(k, gauss_legendre(120, 0.0, 1.0)));
        const std::vector<int> ranks{1, 5, 20};
        std::vector<double> a, b;
        const double ts = seconds([&] { a = mercer_sup_error_serial(sd, ranks); }, 1);
        const double tp = seconds([&] { b = mercer_sup_error(sd, ranks); }, 1);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        row("mercer sup error (n=120)", ts, tp, diff <= 1e-12);
    }
    return 0;
}
