#pragma once

#include <complex>

#include <Eigen/Dense>

namespace opkern {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using MatrixRef = Eigen::Ref<CMatrix>;

namespace linalg {

struct HermitianEig {
    RVector values;   // ascending
    CMatrix vectors;  // empty unless requested
};

struct Svd {
    RVector values;  // descending
    CMatrix u;       // empty unless requested
    CMatrix v;
};

/// Dense Hermitian eigensolve (LAPACK divide and conquer). Uses the real
/// solver when the imaginary part vanishes identically.
HermitianEig hermitian_eig(const CMatrix& a, bool want_vectors);

/// Full square SVD a = u diag(values) v^*.
Svd svd(const CMatrix& a, bool want_vectors);

/// Eigenvalues of a general square matrix (unordered).
CVector general_eigenvalues(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double rel_tol);

double nuclear_norm(const CMatrix& a);

cplx determinant(const CMatrix& a);

bool all_finite(const CMatrix& a);

}  // namespace linalg

/// Applies the OPKERN_THREADS cap to the OpenMP runtime; returns the active
/// worker count.
int configure_threads();

}  // namespace opkern
