#pragma once

// Dense linear-algebra kernels used by the consensus model: real
// non-symmetric eigenvalues, the matrix exponential, Kronecker products, and
// the Lyapunov / Riccati solvers needed for gain synthesis.
//
// Matrices are plain Eigen::MatrixXd values. Every entry point rejects
// non-finite input with a PreconditionError.

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace etcons::matlib {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;

// Eigenvalues with algebraic multiplicity, in no particular order.
using Spectrum = std::vector<Complex>;

struct EigenOptions {
  // Sub-diagonal deflation threshold, relative to the neighbouring diagonal.
  double tolerance = 1e-12;
  // Total QR sweeps allowed, as a multiple of the dimension.
  int max_sweeps_per_dim = 100;
};

struct LyapunovOptions {
  // Relative residual accepted before a NumericalError is raised.
  double residual_tolerance = 1e-9;
};

struct CareOptions {
  double residual_tolerance = 1e-10;
  // Residual that is still accepted when the Newton iterates stagnate at
  // the rounding floor before reaching residual_tolerance.
  double acceptable_residual = 1e-8;
  int max_iterations = 50;
};

// Throws PreconditionError naming `what` when any entry is NaN or Inf.
void RequireFinite(const Mat& m, std::string_view what);

// Throws DimensionError naming `what` unless m is square with dimension >= 1.
void RequireSquare(const Mat& m, std::string_view what);

// Hessenberg reduction followed by Francis double-shift QR.
Spectrum Eigenvalues(const Mat& m, const EigenOptions& options = {});

// Largest real part over the spectrum of m.
double SpectralAbscissa(const Mat& m);

// e^{m t} by scaling and squaring with a diagonal [6/6] Pade approximant.
Mat MatExp(const Mat& m, double t);

Mat Kron(const Mat& a, const Mat& b);

// Solves a^T X + X a + q = 0 for symmetric X. `a` must be Hurwitz.
Mat SolveLyapunov(const Mat& a, const Mat& q,
                  const LyapunovOptions& options = {});

// Stabilizing solution of A^T P + P A - P B B^T P + I = 0 via Newton-Kleinman.
Mat SolveCare(const Mat& a, const Mat& b, const CareOptions& options = {});

// ||A^T P + P A - P B B^T P + I||_F.
double CareResidual(const Mat& a, const Mat& b, const Mat& p);

// Smallest singular value of a (possibly complex) matrix.
double MinSingularValue(const Eigen::MatrixXcd& m);

// Induced 2-norm.
double Norm2(const Mat& m);

}  // namespace etcons::matlib
