#include "opkern/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "opkern/errors.hpp"

namespace opkern {
namespace linalg {

namespace {

void check_info(lapack_int info, const char* routine) {
    if (info != 0) {
        throw NumericError(std::string(routine) + " failed with info=" + std::to_string(info));
    }
}

bool imaginary_part_vanishes(const CMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (a(i, j).imag() != 0.0) return false;
    return true;
}

}  // namespace

HermitianEig hermitian_eig(const CMatrix& a, bool want_vectors) {
    if (a.rows() != a.cols()) throw ArgumentError("hermitian_eig: matrix must be square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    HermitianEig out;
    out.values.resize(n);
    if (n == 0) return out;
    const char jobz = want_vectors ? 'V' : 'N';

    if (imaginary_part_vanishes(a)) {
        Eigen::MatrixXd work = a.real();
        check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, work.data(), n, out.values.data()),
                   "dsyevd");
        if (want_vectors) out.vectors = work.cast<cplx>();
        return out;
    }
    CMatrix work = a;
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, work.data(), n, out.values.data()),
               "zheevd");
    if (want_vectors) out.vectors = std::move(work);
    return out;
}

Svd svd(const CMatrix& a, bool want_vectors) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    Svd out;
    out.values.resize(std::min(m, n));
    if (m == 0 || n == 0) return out;
    CMatrix work = a;
    if (!want_vectors) {
        check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, out.values.data(),
                                  nullptr, 1, nullptr, 1),
                   "zgesdd");
        return out;
    }
    out.u.resize(m, m);
    CMatrix vt(n, n);
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', m, n, work.data(), m, out.values.data(),
                              out.u.data(), m, vt.data(), n),
               "zgesdd");
    out.v = vt.adjoint();
    return out;
}

CVector general_eigenvalues(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ArgumentError("general_eigenvalues: matrix must be square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    CVector w(n);
    if (n == 0) return w;
    CMatrix work = a;
    check_info(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(), nullptr, 1,
                             nullptr, 1),
               "zgeev");
    return w;
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = j; i < a.rows(); ++i)
            worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    return worst <= rel_tol * scale;
}

double nuclear_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1 || a.cols() == 1) return a.norm();
    if (a.rows() <= 32 && a.cols() <= 32) {
        Eigen::JacobiSVD<CMatrix> jsvd(a);
        return jsvd.singularValues().sum();
    }
    return svd(a, false).values.sum();
}

cplx determinant(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ArgumentError("determinant: matrix must be square");
    if (a.rows() == 0) return {1.0, 0.0};
    return a.partialPivLu().determinant();
}

bool all_finite(const CMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

}  // namespace linalg

int configure_threads() {
    if (const char* env = std::getenv("OPKERN_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) {
            omp_set_num_threads(static_cast<int>(std::min<long>(cap, omp_get_num_procs())));
        }
    }
    return omp_get_max_threads();
}

}  // namespace opkern
