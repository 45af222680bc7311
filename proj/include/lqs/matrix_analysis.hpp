#pragma once

// Dense kernels used by the Maslov machinery: matrix exponential, polar
// decomposition, the real <-> complex identification of complex-linear
// matrices, complex determinants and continuous argument lifting.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lqs/error.hpp"
#include "lqs/types.hpp"

namespace lqs {

struct ExpmResult {
  Mat value;
  /// ||expm(A) - expm(A/2)^2||_F / ||expm(A)||_F
  double halving_residual = 0.0;
};

/// Scaling-and-squaring Pade exponential together with its step-halving self check.
inline ExpmResult expm_checked(const Mat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, "expm: matrix must be square");
  ExpmResult r;
  r.value = a.exp();
  if (!r.value.allFinite()) throw Error(ErrorKind::numerical, "expm: overflow");
  const Mat half = Mat(0.5 * a).exp();
  const Mat twice = half * half;
  const double scale = std::max(r.value.norm(), 1e-300);
  r.halving_residual = (r.value - twice).norm() / scale;
  return r;
}

/// Matrix exponential. Throws when the step-halving residual exceeds `tol`
/// for ||A|| <= 50; beyond that norm the residual is not enforced.
inline Mat expm(const Mat& a, double tol = 1e-10) {
  if (!(tol > 0.0)) throw Error(ErrorKind::precondition, "expm: tol must be positive");
  auto r = expm_checked(a);
  if (a.norm() <= 50.0 && r.halving_residual > tol) {
    throw Error(ErrorKind::numerical,
                "expm: halving residual " + std::to_string(r.halving_residual) + " above tolerance");
  }
  return std::move(r.value);
}

struct PolarFactors {
  Mat P;  ///< symmetric positive-definite factor
  Mat U;  ///< orthogonal factor
  double condition = 1.0;
};

/// Left polar decomposition M = P U with P = (M M^T)^{1/2}.
inline PolarFactors polar_decompose(const Mat& m, double max_condition = 1e12) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::dimension, "polar_decompose: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Mat> es(m * m.transpose());
  const Vec& lam = es.eigenvalues();
  const double lo = lam.minCoeff();
  const double hi = lam.maxCoeff();
  PolarFactors f;
  f.condition = lo > 0.0 ? std::sqrt(hi / lo) : std::numeric_limits<double>::infinity();
  if (!(f.condition <= max_condition)) {
    throw Error(ErrorKind::numerical,
                "polar_decompose: condition number " + std::to_string(f.condition) + " above threshold");
  }
  const Vec s = lam.cwiseSqrt();
  const Mat& q = es.eigenvectors();
  f.P = q * s.asDiagonal() * q.transpose();
  f.U = q * s.cwiseInverse().asDiagonal() * q.transpose() * m;
  return f;
}

/// The standard complex structure J0 = [[0, -I], [I, 0]] in (p, q) ordering.
inline Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return j;
}

/// ||U J0 - J0 U||_max: zero exactly when U is complex-linear.
inline double complex_linearity_defect(const Mat& u) {
  const Mat j = standard_j(static_cast<int>(u.rows() / 2));
  return max_abs(u * j - j * u);
}

/// Identifies a complex-linear [[X, -Y], [Y, X]] with X + iY.
inline CMat complexify_orthosymplectic(const Mat& u, double tol = 1e-8) {
  if (u.rows() != u.cols() || u.rows() % 2 != 0)
    throw Error(ErrorKind::dimension, "complexify: matrix must be 2n x 2n");
  const double defect = complex_linearity_defect(u);
  if (defect > tol * std::max(1.0, max_abs(u))) {
    throw Error(ErrorKind::precondition,
                "complexify: matrix is not complex-linear (defect " + std::to_string(defect) + ")");
  }
  const auto n = u.rows() / 2;
  CMat c(n, n);
  c.real() = 0.5 * (u.topLeftCorner(n, n) + u.bottomRightCorner(n, n));
  c.imag() = 0.5 * (u.bottomLeftCorner(n, n) - u.topRightCorner(n, n));
  return c;
}

/// Inverse of complexify: X + iY -> [[X, -Y], [Y, X]].
inline Mat realify(const CMat& c) {
  const auto n = c.rows();
  Mat u(2 * n, 2 * n);
  u.topLeftCorner(n, n) = c.real();
  u.bottomRightCorner(n, n) = c.real();
  u.bottomLeftCorner(n, n) = c.imag();
  u.topRightCorner(n, n) = -c.imag();
  return u;
}

inline Complex det_complex(const CMat& c) {
  if (c.rows() != c.cols()) throw Error(ErrorKind::dimension, "det_complex: matrix must be square");
  if (c.rows() == 0) return Complex(1.0, 0.0);
  return c.partialPivLu().determinant();
}

/// Smallest wrapped difference arg(b) - arg(a) in (-pi, pi].
inline double phase_step(Complex a, Complex b) { return std::arg(b * std::conj(a)); }

/// Continuous lift of a sequence of unit phases. Consecutive samples must
/// turn by less than pi - margin, otherwise the winding is ambiguous.
inline std::vector<double> lift_argument(std::span<const Complex> phases, double margin = 1e-6) {
  std::vector<double> theta;
  theta.reserve(phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) {
    if (k == 0) {
      theta.push_back(std::arg(phases[0]));
      continue;
    }
    const double step = phase_step(phases[k - 1], phases[k]);
    if (std::abs(step) >= std::numbers::pi - margin) {
      throw Error(ErrorKind::undersampled,
                  "lift_argument: consecutive phase gap too large at sample " + std::to_string(k));
    }
    theta.push_back(theta.back() + step);
  }
  return theta;
}

struct PolarSample {
  double t = 0.0;
  Mat P;
  Mat U;
  double theta = 0.0;  ///< lifted arg det_C U(t)
};

/// Samples the polar factors of exp(tB) on a uniform grid and lifts
/// arg det_C U(t). Forms exp(tB) explicitly, so it is only usable while
/// exp(tB) stays well conditioned (e.g. elliptic B or short horizons).
inline std::vector<PolarSample> polar_path(const Mat& b, double t_max, double dt) {
  if (!(t_max > 0.0 && dt > 0.0)) throw Error(ErrorKind::precondition, "polar_path: t_max and dt must be positive");
  const Mat step = expm(dt * b);
  const auto steps = static_cast<long>(std::llround(t_max / dt));
  std::vector<PolarSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Mat m = Mat::Identity(b.rows(), b.cols());
  Complex prev(1.0, 0.0);
  double theta = 0.0;
  for (long k = 0; k <= steps; ++k) {
    if (k > 0) m = step * m;
    auto f = polar_decompose(m);
    Complex d = det_complex(complexify_orthosymplectic(f.U, 1e-6));
    d /= std::abs(d);
    if (k > 0) {
      const double s = phase_step(prev, d);
      if (std::abs(s) > std::numbers::pi / 2)
        throw Error(ErrorKind::undersampled, "polar_path: step too coarse");
      theta += s;
    } else {
      theta = std::arg(d);
    }
    prev = d;
    out.push_back({static_cast<double>(k) * dt, std::move(f.P), std::move(f.U), theta});
  }
  return out;
}

}  // namespace lqs
