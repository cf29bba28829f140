#pragma once

#include <string>
#include <vector>

#include "opkern/spectral.hpp"

namespace opkern {

/// ∏(1 + zλ_ℓ) over the computed eigenvalues.
cplx det1(const SpectralData& sd, cplx z);

/// ∏(1 + zλ_ℓ) e^{−zλ_ℓ}.
cplx det2(const SpectralData& sd, cplx z);

/// det((I + zA) exp(−zA)) straight from the block matrix; dimension ≤ 2000.
cplx det2_via_R2(const BlockOperator& op, cplx z);

/// Fredholm coefficient integrand for one node tuple. `b` is the nd×nd block
/// matrix of K(x_α, x_β); returns Σ over component multi-indices j of
/// det[K_{j_α j_β}(x_α, x_β)], with the α = β entries zeroed when `modified`.
cplx multi_index_determinant(const CMatrix& b, int n, int d, bool modified);

inline constexpr int kMaxFredholmOrder = 8;

/// b_n by quadrature. Intervals integrate over the ordered simplex with a
/// collapsed Gauss-Legendre rule; boxes sum over all node tuples. n = 1 uses
/// `rule` as given, larger n a reduced rule (≤ 16 points per axis).
cplx fredholm_coeff(const KernelSpec& spec, const QuadratureRule& rule, int n, bool modified);

/// Single-threaded reference; bitwise identical to fredholm_coeff.
cplx fredholm_coeff_serial(const KernelSpec& spec, const QuadratureRule& rule, int n, bool modified);

/// Points per axis actually used for b_n.
int fredholm_order(const QuadratureRule& rule, int n);

enum class SeriesMethod { TensorQuadrature, EigenDerived };

const char* to_string(SeriesMethod m);

struct DeterminantSeries {
    std::vector<cplx> coeffs;  // b_0 = 1, …, b_N
    SeriesMethod method = SeriesMethod::TensorQuadrature;
    bool modified = false;
    std::string kernel_id;
};

DeterminantSeries fredholm_series(const KernelSpec& spec, const QuadratureRule& rule, int n_max,
                                  bool modified);

/// Coefficients of det1 (or det2 when `modified`) from eigenvalue power sums.
DeterminantSeries eigen_series(const SpectralData& sd, int n_max, bool modified,
                               std::string kernel_id = {});

struct SeriesValue {
    cplx value;
    double truncation_estimate = 0.0;  // |b_N z^N|
};

SeriesValue series_eval(const DeterminantSeries& series, cplx z);

struct GrowthEstimate {
    double rho_hat = 0.0;  // 1/A from ln(1/|b_n|) ≈ A n ln n + B n + C ln n + D
    double rho_raw = 0.0;  // max over the window of n ln n / ln(1/|b_n|)
    std::vector<int> window;
    double residual = 0.0;
};

GrowthEstimate order_of_growth(const DeterminantSeries& series);

/// −1/λ_ℓ for λ_ℓ ≠ 0 with |1/λ_ℓ| ≤ radius, by increasing modulus.
std::vector<cplx> det_zeros(const SpectralData& sd, double radius);

struct ZGrid {
    double re0 = -2, re1 = 2;
    int nre = 5;
    double im0 = -2, im1 = 2;
    int nim = 5;

    std::vector<cplx> points() const;
};

/// "re0:re1:nre,im0:im1:nim".
ZGrid parse_z_grid(const std::string& text);

}  // namespace opkern
