#include "etcons/matlib.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "etcons/errors.h"

namespace etcons::matlib {
namespace {

double Sign(double magnitude, double sign_of) {
  return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Householder reduction to upper Hessenberg form, in place.
void ReduceToHessenberg(Mat& h) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    Vec v = h.block(k + 1, k, len, 1);
    const double norm_x = v.norm();
    if (norm_x == 0.0) continue;
    const double alpha = -Sign(norm_x, v(0));
    v(0) -= alpha;
    const double norm_v = v.norm();
    if (norm_v == 0.0) continue;
    v /= norm_v;
    // H <- (I - 2vv^T) H (I - 2vv^T) restricted to the active block.
    auto rows = h.block(k + 1, k, len, n - k);
    rows.noalias() -= 2.0 * v * (v.transpose() * rows);
    auto cols = h.block(0, k + 1, n, len);
    cols.noalias() -= 2.0 * (cols * v) * v.transpose();
    h.block(k + 2, k, len - 1, 1).setZero();
  }
}

// Francis double-shift QR on an upper Hessenberg matrix. Follows the
// classic EISPACK hqr layout; `a` is destroyed.
Spectrum HessenbergQr(Mat& a, const EigenOptions& options) {
  const int n = static_cast<int>(a.rows());
  Spectrum out(n);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }
  const double tol =
      std::max(options.tolerance, std::numeric_limits<double>::epsilon());
  const long budget = static_cast<long>(options.max_sweeps_per_dim) * n;
  long sweeps = 0;

  int nn = n - 1;
  double t = 0.0;
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= tol * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        out[nn] = Complex(x + t, 0.0);
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + Sign(z, p);
            const double hi = x + z;
            const double lo = (z != 0.0) ? x - w / z : hi;
            out[nn - 1] = Complex(hi, 0.0);
            out[nn] = Complex(lo, 0.0);
          } else {
            out[nn - 1] = Complex(x + p, z);
            out[nn] = Complex(x + p, -z);
          }
          nn -= 2;
        } else {
          if (++sweeps > budget) {
            throw NumericalError(
                "eigenvalues: QR iteration did not converge within " +
                std::to_string(budget) + " sweeps on a " + std::to_string(n) +
                "x" + std::to_string(n) + " matrix");
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                               std::abs(a(m + 1, m + 1)));
            if (u <= std::numeric_limits<double>::epsilon() * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = Sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return out;
}

Vec VecOf(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

}  // namespace

void RequireFinite(const Mat& m, std::string_view what) {
  if (!m.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
  }
}

void RequireSquare(const Mat& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Spectrum Eigenvalues(const Mat& m, const EigenOptions& options) {
  RequireSquare(m, "eigenvalues");
  RequireFinite(m, "eigenvalues");
  Mat h = m;
  ReduceToHessenberg(h);
  return HessenbergQr(h, options);
}

double SpectralAbscissa(const Mat& m) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : Eigenvalues(m)) best = std::max(best, z.real());
  return best;
}

Mat MatExp(const Mat& m, double t) {
  RequireSquare(m, "mat_exp");
  RequireFinite(m, "mat_exp");
  if (!std::isfinite(t)) throw PreconditionError("mat_exp: time must be finite");
  const Eigen::Index n = m.rows();
  if (t == 0.0) return Mat::Identity(n, n);

  Mat x = m * t;
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    x /= std::ldexp(1.0, squarings);
  }

  constexpr int kOrder = 6;
  Mat numer = Mat::Identity(n, n);
  Mat denom = Mat::Identity(n, n);
  Mat power = Mat::Identity(n, n);
  double c = 1.0;
  for (int k = 1; k <= kOrder; ++k) {
    c *= static_cast<double>(kOrder - k + 1) /
         static_cast<double>((2 * kOrder - k + 1) * k);
    power = power * x;
    numer += c * power;
    denom += ((k % 2 == 0) ? c : -c) * power;
  }
  Mat f = denom.partialPivLu().solve(numer);
  for (int i = 0; i < squarings; ++i) f = f * f;
  return f;
}

Mat Kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat SolveLyapunov(const Mat& a, const Mat& q, const LyapunovOptions& options) {
  RequireSquare(a, "solve_lyapunov");
  RequireFinite(a, "solve_lyapunov");
  RequireFinite(q, "solve_lyapunov");
  const Eigen::Index n = a.rows();
  if (q.rows() != n || q.cols() != n) {
    throw DimensionError("solve_lyapunov: q must match a's dimension");
  }
  if ((q - q.transpose()).norm() > 1e-10 * std::max(1.0, q.norm())) {
    throw PreconditionError("solve_lyapunov: q must be symmetric");
  }
  if (SpectralAbscissa(a) >= 0.0) {
    throw PreconditionError("solve_lyapunov: a is not Hurwitz");
  }

  // vec(a^T X + X a) = (I (x) a^T + a^T (x) I) vec(X), column-major vec.
  const Mat eye = Mat::Identity(n, n);
  const Mat at = a.transpose();
  const Mat system = Kron(eye, at) + Kron(at, eye);
  Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible()) {
    throw NumericalError("solve_lyapunov: vectorized system is singular");
  }
  const Vec sol = lu.solve(-VecOf(q));
  Mat x = Eigen::Map<const Mat>(sol.data(), n, n);
  x = 0.5 * (x + x.transpose()).eval();

  const double residual = (at * x + x * a + q).norm();
  const double scale = std::max(q.norm(), std::numeric_limits<double>::min());
  if (residual > options.residual_tolerance * scale) {
    throw NumericalError("solve_lyapunov: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return x;
}

double CareResidual(const Mat& a, const Mat& b, const Mat& p) {
  const Eigen::Index n = a.rows();
  return (a.transpose() * p + p * a - p * b * b.transpose() * p +
          Mat::Identity(n, n))
      .norm();
}

Mat SolveCare(const Mat& a, const Mat& b, const CareOptions& options) {
  RequireSquare(a, "solve_care");
  RequireFinite(a, "solve_care");
  RequireFinite(b, "solve_care");
  const Eigen::Index n = a.rows();
  if (b.rows() != n || b.cols() < 1) {
    throw DimensionError("solve_care: b must have as many rows as a");
  }
  const Mat eye = Mat::Identity(n, n);

  // Stabilizing seed. When a is unstable, shift it fully into the right
  // half plane and use the Bass construction K0 = B^T Z^+ with
  // (a + beta I) Z + Z (a + beta I)^T = 2 B B^T.
  Mat gain = Mat::Zero(b.cols(), n);
  const Spectrum spec = Eigenvalues(a);
  double max_re = -std::numeric_limits<double>::infinity();
  double max_abs_re = 0.0;
  for (const Complex& z : spec) {
    max_re = std::max(max_re, z.real());
    max_abs_re = std::max(max_abs_re, std::abs(z.real()));
  }
  if (max_re >= -1e-9) {
    const double beta = max_abs_re + 1.0;
    const Mat shifted = -(a + beta * eye).transpose();
    const Mat z = SolveLyapunov(shifted, 2.0 * b * b.transpose());
    gain = b.transpose() *
           Eigen::CompleteOrthogonalDecomposition<Mat>(z).pseudoInverse();
    if (SpectralAbscissa(a - b * gain) >= 0.0) {
      throw PreconditionError(
          "solve_care: (a, b) is not stabilizable; no stabilizing seed gain");
    }
  }

  Mat p = Mat::Zero(n, n);
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const Mat closed = a - b * gain;
    Mat next = SolveLyapunov(closed, eye + gain.transpose() * gain);
    const double change = (next - p).norm();
    p = std::move(next);
    gain = b.transpose() * p;
    residual = CareResidual(a, b, p);
    if (residual <= options.residual_tolerance) break;
    if (iter > 0 && change <= 1e-14 * std::max(1.0, p.norm())) break;
  }
  if (residual > options.acceptable_residual) {
    throw NumericalError("solve_care: Newton-Kleinman failed to converge after " +
                         std::to_string(iter) + " iterations (residual " +
                         std::to_string(residual) + ")");
  }
  return p;
}

double MinSingularValue(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0.0;
  return sv(sv.size() - 1);
}

double Norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace etcons::matlib
