#pragma once

// The Maslov quasi-state zeta_M on sp(2n, R), computed three ways:
//   * maslov_limit     lim theta(t) / t along the path exp(tB)
//   * maslov_spectral  sum over imaginary eigenvalue pairs +-ib of -b * (Krein signature)
//   * maslov_dim2      closed form on sp(2, R)

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "lqs/error.hpp"
#include "lqs/matrix_analysis.hpp"
#include "lqs/symplectic.hpp"
#include "lqs/williamson.hpp"

namespace lqs {

struct MaslovLimitConfig {
  double t_max = 2000.0;
  double dt = 0.05;
  double tol = 1e-2;  ///< target accuracy; estimates whose error bar exceeds it are flagged
  int max_refinements = 12;

  void validate() const {
    if (!(t_max > 0.0) || !(dt > 0.0) || !(dt <= t_max) || max_refinements < 0 || !(tol > 0.0))
      throw Error(ErrorKind::precondition, "MaslovLimitConfig: need t_max > 0, 0 < dt <= t_max, tol > 0");
  }
};

struct MaslovEstimate {
  double value = 0.0;
  /// max over t in [t_max/2, t_max] of |theta(t)/t - value|; bounds the
  /// difference to the estimate at t_max/2.
  double error_bar = 0.0;
  long samples_used = 0;
  bool within_tol = true;  ///< error_bar <= cfg.tol
};

struct PhaseTrace {
  std::vector<double> t;
  std::vector<double> theta;
  int refinements = 0;
};

/// Follows theta(t) = lifted arg det_C W(t), where W(t) is the unitary polar
/// factor of the complex n x n frame X + iY of the Lagrangian plane
/// exp(tB) span{e_1..e_n}. The frame is advanced by exp(dt B) and renormalized
/// by a Cholesky factor with real positive diagonal after every step, so
/// nothing overflows for hyperbolic B and arg det is unchanged by the
/// renormalization. On complex-linear paths W(t) is exactly complexify(exp(tB)).
/// A step whose phase change exceeds pi/2 is retried with half the step.
inline PhaseTrace trace_phase(const Mat& b, const MaslovLimitConfig& cfg) {
  cfg.validate();
  const int n = half_dim(b);
  PhaseTrace tr;
  const auto est_steps = static_cast<std::size_t>(cfg.t_max / cfg.dt) + 2;
  tr.t.reserve(est_steps);
  tr.theta.reserve(est_steps);
  tr.t.push_back(0.0);
  tr.theta.push_back(0.0);

  double h = cfg.dt;
  Mat step = expm(h * b);
  double last_h = h;
  Mat last_step = step;

  CMat w = CMat::Identity(n, n);
  Mat frame(2 * n, n);
  Complex prev(1.0, 0.0);
  double theta = 0.0;
  double t = 0.0;
  long k = 0;  // steps taken at the current step size since the last refinement
  double t_base = 0.0;
  const double end_tol = 1e-9 * cfg.t_max;

  while (cfg.t_max - t > end_tol) {
    double this_h = h;
    double t_next = t_base + static_cast<double>(k + 1) * h;
    if (t_next > cfg.t_max - end_tol) {
      t_next = cfg.t_max;
      this_h = cfg.t_max - t;
    }
    const Mat* e = &step;
    if (this_h != h) {
      if (this_h != last_h) {
        last_h = this_h;
        last_step = expm(this_h * b);
      }
      e = &last_step;
    }
    frame.topRows(n) = w.real();
    frame.bottomRows(n) = w.imag();
    const Mat moved = (*e) * frame;
    CMat wn(n, n);
    wn.real() = moved.topRows(n);
    wn.imag() = moved.bottomRows(n);
    const CMat gram = wn.adjoint() * wn;
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success || !wn.allFinite())
      throw Error(ErrorKind::numerical, "maslov_limit: frame lost rank");
    // wn * L^{-H}: unitary, and det L^{-H} is real positive
    const CMat unitary = llt.matrixU().solve<Eigen::OnTheRight>(wn);
    Complex d = det_complex(unitary);
    d /= std::abs(d);
    const double g = phase_step(prev, d);
    if (std::abs(g) > std::numbers::pi / 2) {
      if (tr.refinements >= cfg.max_refinements)
        throw Error(ErrorKind::undersampled, "maslov_limit: phase still undersampled after refinements");
      ++tr.refinements;
      t_base = t;
      k = 0;
      h *= 0.5;
      step = expm(h * b);
      continue;
    }
    w = unitary;
    prev = d;
    theta += g;
    t = t_next;
    ++k;
    tr.t.push_back(t);
    tr.theta.push_back(theta);
  }
  return tr;
}

inline MaslovEstimate maslov_limit(const Mat& b, const MaslovLimitConfig& cfg = {}) {
  const PhaseTrace tr = trace_phase(b, cfg);
  MaslovEstimate est;
  const double big_t = tr.t.back();
  est.value = tr.theta.back() / big_t;
  double bar = 0.0;
  for (std::size_t i = 1; i < tr.t.size(); ++i) {
    if (tr.t[i] < 0.5 * big_t * (1.0 - 1e-12)) continue;
    bar = std::max(bar, std::abs(tr.theta[i] / tr.t[i] - est.value));
  }
  est.error_bar = bar;
  est.samples_used = static_cast<long>(tr.t.size());
  est.within_tol = bar <= cfg.tol;
  return est;
}

inline MaslovEstimate maslov_limit(const SpElement& b, const MaslovLimitConfig& cfg = {}) {
  return maslov_limit(b.mat(), cfg);
}

/// zeta_M on [[a, b], [c, -a]].
inline double maslov_dim2(double a, double b, double c) {
  const double disc = a * a + b * c;
  if (disc >= 0.0) return 0.0;
  // disc < 0 forces b c < 0, so exactly one of the two sign patterns holds
  return b < 0.0 ? std::sqrt(-disc) : -std::sqrt(-disc);
}

inline double maslov_dim2(const SpElement& a) {
  if (a.n() != 1) throw Error(ErrorKind::precondition, "maslov_dim2: requires n = 1");
  const Mat& m = a.mat();
  return maslov_dim2(0.5 * (m(0, 0) - m(1, 1)), m(0, 1), m(1, 0));
}

/// zeta_M(Y_{xi,eta}) = -|omega(xi, eta)|, zeta_M(Z_{xi,eta}) = 0.
inline double maslov_on_descriptor(const RankOneDescriptor& d) {
  if (d.xi.size() != d.eta.size() || d.xi.size() % 2 != 0 || d.xi.size() == 0)
    throw Error(ErrorKind::dimension, "maslov_on_descriptor: bad vector dimensions");
  const SymplecticSpace sp(static_cast<int>(d.xi.size() / 2));
  switch (d.kind) {
    case RankOneKind::Y: return -std::abs(sp.omega(d.xi, d.eta));
    case RankOneKind::Z: return 0.0;
    case RankOneKind::T:
      if (d.xi != d.eta) throw Error(ErrorKind::not_in_algebra, "T_{xi,eta} with xi != eta is not in sp");
      return 0.0;  // T_{xi,xi} = Y_{xi,0}
  }
  return 0.0;
}

/// On u(J0) (A commuting with the standard complex structure) exp(tA) stays
/// unitary, so zeta_M(A) = Im tr of the complex n x n form of A.
inline double maslov_unitary_trace(const SpElement& a) {
  return complexify_orthosymplectic(a.mat()).trace().imag();
}

/// Spectral formula. Real pairs, quadruples and zeros contribute nothing;
/// an imaginary pair +-ib with Krein signature (p, q) contributes -b (p - q).
/// Refuses non-semi-simple input.
inline double maslov_spectral(const SpElement& b, const ClassificationTolerances& tol = {}) {
  const SpectrumReport rep = classify_eigenstructure(b, tol);
  if (!rep.semisimple)
    throw Error(ErrorKind::not_semisimple,
                "maslov_spectral: input is not semi-simple (eigenvector condition " +
                    std::to_string(rep.eigenvector_condition) + ")");
  double total = 0.0;
  for (const auto& c : rep.clusters)
    if (c.kind == SpectralKind::imaginary_pair)
      total -= c.b * static_cast<double>(c.krein_positive - c.krein_negative);
  return total;
}

}  // namespace lqs
