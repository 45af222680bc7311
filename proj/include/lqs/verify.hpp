#pragma once

// Property checkers and structure fitters for Lie quasi-states on sp(2n, R).
// Each check draws its inputs from a seeded Rng; trial k uses rng.split(k),
// so results do not depend on evaluation order.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lqs/error.hpp"
#include "lqs/maslov.hpp"
#include "lqs/quasistates.hpp"
#include "lqs/random.hpp"
#include "lqs/report.hpp"
#include "lqs/symplectic.hpp"
#include "lqs/williamson.hpp"

namespace lqs {

/// Per-trial tolerance: absolute + error_bar_factor * (sum of evaluation error bars).
struct TolerancePolicy {
  double absolute = 0.0;
  double error_bar_factor = 0.0;

  double operator()(double summed_bars) const { return absolute + error_bar_factor * summed_bars; }
};

/// F(xi, eta) = zeta(Y_{xi,eta}) and G(xi, eta) = zeta(Z_{xi,eta}).
class FGEvaluator {
 public:
  FGEvaluator(QuasiState zeta, SymplecticSpace space) : zeta_(std::move(zeta)), space_(std::move(space)) {}

  Evaluation f(const Vec& xi, const Vec& eta) const { return zeta_.evaluate(realize(y_desc(xi, eta))); }
  Evaluation g(const Vec& xi, const Vec& eta) const { return zeta_.evaluate(realize(z_desc(xi, eta))); }

  /// eta -> G(xi, eta) for fixed xi.
  std::function<double(const Vec&)> g_partial(Vec xi) const {
    return [this, xi = std::move(xi)](const Vec& eta) { return g(xi, eta).value; };
  }

  /// xi + i eta lies in the cone W (omega > 0) or W^- (omega < 0).
  int cone(const Vec& xi, const Vec& eta) const {
    const double w = space_.omega(xi, eta);
    return w > 0 ? 1 : (w < 0 ? -1 : 0);
  }

  const SymplecticSpace& space() const { return space_; }

 private:
  QuasiState zeta_;
  SymplecticSpace space_;
};

using PairSource = std::function<CommutingPair(Rng&)>;

/// |zeta(c1 A + c2 B) - c1 zeta(A) - c2 zeta(B)| over commuting pairs from `source`, c1, c2 in [-2, 2].
inline VerificationReport check_quasi_linearity(const QuasiState& zeta, const std::string& source_name,
                                                const PairSource& source, int trials, TolerancePolicy tol,
                                                const Rng& rng) {
  if (trials < 1) throw Error(ErrorKind::precondition, "check_quasi_linearity: trials must be >= 1");
  VerificationReport r;
  r.check_name = "quasi_linearity/" + zeta.description() + "/" + source_name;
  r.expect_failure = zeta.provenance() == Provenance::control;
  for (int k = 0; k < trials; ++k) {
    Rng trng = rng.split(static_cast<std::uint64_t>(k));
    const CommutingPair pair = source(trng);
    const double c1 = trng.uniform(-2.0, 2.0), c2 = trng.uniform(-2.0, 2.0);
    const auto za = zeta.evaluate(pair.a);
    const auto zb = zeta.evaluate(pair.b);
    const auto zs = zeta.evaluate(c1 * pair.a + c2 * pair.b);
    const double defect = std::abs(zs.value - c1 * za.value - c2 * zb.value);
    const double bars = zs.error_bar + std::abs(c1) * za.error_bar + std::abs(c2) * zb.error_bar;
    r.add_trial(defect, tol(bars));
  }
  r.finalize();
  return r;
}

inline VerificationReport check_quasi_linearity(const QuasiState& zeta, const SymplecticSpace& sp,
                                                PairStrategy strategy, int trials, TolerancePolicy tol,
                                                const Rng& rng) {
  auto r = check_quasi_linearity(
      zeta, std::string(to_string(strategy)) + "/n" + std::to_string(sp.n()),
      [&](Rng& g) { return commuting_pair(sp, strategy, g); }, trials, tol, rng);
  if (zeta.provenance() == Provenance::control && sp.n() == 1)
    r.notes.push_back("n = 1: commuting pairs are proportional; a norm fails only through zeta(-A) != -zeta(A)");
  return r;
}

/// Two random odd polynomials in a fixed A: both lie in span{A, A^3, ..., A^{2n-1}}.
inline CommutingPair odd_polynomial_pair(const SpElement& a, Rng& rng, double coeff_scale = 1.5) {
  const int n = a.n();
  const Mat sq = a.mat() * a.mat();
  Mat pa = Mat::Zero(2 * n, 2 * n), pb = pa, p = a.mat();
  for (int i = 0; i < n; ++i) {
    pa += rng.uniform(-coeff_scale, coeff_scale) * p;
    pb += rng.uniform(-coeff_scale, coeff_scale) * p;
    p = p * sq;
  }
  CommutingPair out{SpElement::project(pa), SpElement::project(pb), 0.0};
  out.commutator_defect = max_abs(bracket(out.a, out.b));
  return out;
}

struct AdInvarianceOptions {
  double group_scale = 0.5;
  double element_scale = 1.0;
};

inline VerificationReport check_ad_invariance(const QuasiState& zeta, const SymplecticSpace& sp, int trials,
                                              TolerancePolicy tol, const Rng& rng,
                                              const AdInvarianceOptions& opt = {}) {
  if (trials < 1) throw Error(ErrorKind::precondition, "check_ad_invariance: trials must be >= 1");
  VerificationReport r;
  r.check_name = "ad_invariance/" + zeta.description() + "/n" + std::to_string(sp.n());
  r.expect_failure = zeta.provenance() == Provenance::linear || zeta.provenance() == Provenance::control;
  for (int k = 0; k < trials; ++k) {
    Rng trng = rng.split(static_cast<std::uint64_t>(k));
    const Mat g = random_symplectic_group_element(sp, opt.group_scale, trng);
    const SpElement a = random_sp_element(sp, opt.element_scale, trng);
    const auto z0 = zeta.evaluate(a);
    const auto z1 = zeta.evaluate(a.conjugated(g));
    r.add_trial(std::abs(z1.value - z0.value), tol(z0.error_bar + z1.error_bar));
  }
  r.finalize();
  return r;
}

/// Orthonormal (Frobenius) basis of {A in sp(2n) : A J = J A}, of dimension n^2.
inline std::vector<Mat> unitary_subalgebra_basis(const CompatibleComplexStructure& j) {
  const int n = j.n();
  const int dim = 2 * n;
  const SymplecticSpace sp(n);
  const Mat omega_inv = -sp.omega_matrix();
  std::vector<Mat> sp_basis;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      Mat s = Mat::Zero(dim, dim);
      s(a, b) = 1.0;
      s(b, a) = 1.0;
      sp_basis.push_back(omega_inv * s);
    }
  const int m = static_cast<int>(sp_basis.size());
  Mat constraint(dim * dim, m);
  for (int k = 0; k < m; ++k) {
    const Mat c = sp_basis[k] * j.mat() - j.mat() * sp_basis[k];
    constraint.col(k) = Eigen::Map<const Vec>(c.data(), c.size());
  }
  Eigen::JacobiSVD<Mat> svd(constraint, Eigen::ComputeFullV);
  const Vec s = svd.singularValues();
  const double thresh = 1e-10 * std::max(1.0, s(0));
  int null_dim = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= thresh) ++null_dim;
  null_dim += static_cast<int>(m - s.size());
  if (null_dim != n * n)
    throw Error(ErrorKind::numerical, "u(J) basis: null space has dimension " + std::to_string(null_dim) +
                                          ", expected " + std::to_string(n * n));
  Mat vecs(dim * dim, null_dim);
  for (int c = 0; c < null_dim; ++c) {
    const Vec coef = svd.matrixV().col(m - null_dim + c);
    Mat a = Mat::Zero(dim, dim);
    for (int k = 0; k < m; ++k) a += coef(k) * sp_basis[k];
    vecs.col(c) = Eigen::Map<const Vec>(a.data(), a.size());
  }
  const Eigen::HouseholderQR<Mat> qr(vecs);
  const Mat q = qr.householderQ() * Mat::Identity(dim * dim, null_dim);
  std::vector<Mat> out;
  for (int c = 0; c < null_dim; ++c) out.push_back(Eigen::Map<const Mat>(q.col(c).data(), dim, dim));
  return out;
}

namespace detail {

struct LinearFit {
  Vec coef;
  double train_rms = 0.0;
  std::vector<double> held_out_abs;
};

// Least-squares fit on the first `train` rows, absolute residuals on the rest.
inline LinearFit fit_split(const Mat& design, const Vec& target, int train) {
  const int total = static_cast<int>(design.rows());
  if (train < design.cols()) throw Error(ErrorKind::numerical, "fit: fewer training rows than unknowns");
  const Eigen::ColPivHouseholderQR<Mat> qr(design.topRows(train));
  if (qr.rank() < design.cols()) throw Error(ErrorKind::numerical, "fit: design matrix is rank deficient");
  LinearFit out;
  out.coef = qr.solve(target.head(train));
  out.train_rms = std::sqrt((design.topRows(train) * out.coef - target.head(train)).squaredNorm() / train);
  for (int i = train; i < total; ++i) out.held_out_abs.push_back(std::abs(design.row(i).dot(out.coef) - target(i)));
  return out;
}

inline int train_count(int samples) { return static_cast<int>(std::lround(0.7 * samples)); }

inline VerificationReport refused(std::string name, std::string why) {
  VerificationReport r;
  r.check_name = std::move(name);
  r.applicable = false;
  r.notes.push_back(std::move(why));
  r.finalize();
  return r;
}

}  // namespace detail

/// Fits zeta restricted to u(J) by A -> tr(H A): 10 n^2 samples, 70% for the
/// fit and 30% held out. Requires n >= 3 and a continuous zeta.
inline VerificationReport fit_gleason_on_unitary(const QuasiState& zeta, const CompatibleComplexStructure& j,
                                                 double tol, const Rng& rng) {
  const int n = j.n();
  const std::string name = "gleason/" + zeta.description() + "/n" + std::to_string(n);
  if (n < 3) return detail::refused(name, "hypothesis n >= 3 not met");
  if (!zeta.continuous()) return detail::refused(name, "hypothesis: zeta must be continuous");
  const auto basis = unitary_subalgebra_basis(j);
  const int unknowns = static_cast<int>(basis.size());
  const int samples = 10 * unknowns;
  const int train = detail::train_count(samples);
  Mat design(samples, unknowns);
  Vec target(samples);
  for (int s = 0; s < samples; ++s) {
    Rng trng = rng.split(static_cast<std::uint64_t>(s));
    Mat a = Mat::Zero(2 * n, 2 * n);
    for (int k = 0; k < unknowns; ++k) {
      design(s, k) = trng.normal();
      a += design(s, k) * basis[k];
    }
    target(s) = zeta(SpElement::project(a));
  }
  const auto fit = detail::fit_split(design, target, train);
  VerificationReport r;
  r.check_name = name;
  for (double d : fit.held_out_abs) r.add_trial(d, tol);
  Mat h = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < unknowns; ++k) h += fit.coef(k) * basis[k].transpose();
  r.fitted_matrices["H"] = h;
  r.fitted["train_rms"] = fit.train_rms;
  r.fitted["samples"] = samples;
  r.finalize();
  return r;
}

/// |tr(H A) - oracle(A)| on random elements of u(J).
inline VerificationReport compare_unitary_functional(const Mat& h, const std::function<double(const SpElement&)>& oracle,
                                                     const CompatibleComplexStructure& j, int trials, double tol,
                                                     const Rng& rng, std::string label = "oracle") {
  const auto basis = unitary_subalgebra_basis(j);
  VerificationReport r;
  r.check_name = "unitary_functional/" + label + "/n" + std::to_string(j.n());
  for (int k = 0; k < trials; ++k) {
    Rng trng = rng.split(static_cast<std::uint64_t>(k));
    Mat a = Mat::Zero(2 * j.n(), 2 * j.n());
    for (const auto& b : basis) a += trng.normal() * b;
    const SpElement x = SpElement::project(a);
    r.add_trial(std::abs((h * x.mat()).trace() - oracle(x)), tol);
  }
  r.finalize();
  return r;
}

/// Two transversal Lagrangian subspaces L1 = g span{e}, L2 = g span{f} and the
/// isomorphism gl(n) -> R(L1, L2) = {A in sp : A L1 in L1, A L2 in L2}.
class GlEmbedding {
 public:
  explicit GlEmbedding(Mat frame) : g_(std::move(frame)), g_inv_(symplectic_inverse(g_)) {}

  int n() const { return static_cast<int>(g_.rows() / 2); }
  const Mat& frame() const { return g_; }
  Mat l1() const { return g_.leftCols(n()); }
  Mat l2() const { return g_.rightCols(n()); }

  /// The element of R(L1, L2) acting as M on L1 (in the basis g e_i).
  SpElement embed(const Mat& m) const {
    const int k = n();
    if (m.rows() != k || m.cols() != k) throw Error(ErrorKind::dimension, "embed: expected an n x n matrix");
    Mat a = Mat::Zero(2 * k, 2 * k);
    a.topLeftCorner(k, k) = m;
    a.bottomRightCorner(k, k) = -m.transpose();
    return SpElement::project(g_ * a * g_inv_);
  }

  /// Matrix of A|_{L1} in the basis g e_i.
  Mat restrict_to_l1(const SpElement& a) const { return (g_inv_ * a.mat() * g_).topLeftCorner(n(), n()); }

 private:
  Mat g_;
  Mat g_inv_;
};

inline GlEmbedding embed_gl(const SymplecticSpace& sp, Rng& rng, double scale = 0.5) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Mat g = random_symplectic_group_element(sp, scale, rng);
    Eigen::JacobiSVD<Mat> svd(g);
    const Vec s = svd.singularValues();
    if (s(s.size() - 1) > 1e-6 * s(0)) return GlEmbedding(std::move(g));
  }
  throw Error(ErrorKind::numerical, "embed_gl: could not draw transversal Lagrangian frames");
}

/// B_{xi,eta} x = (x, eta) xi on R^n.
inline Mat rank_one_gl(const Vec& xi, const Vec& eta) { return xi * eta.transpose(); }

/// Fits zeta(embed(B_{xi,eta})) = (N xi, eta) over random xi, eta.
inline VerificationReport fit_rank_one_trace(const QuasiState& zeta, const GlEmbedding& emb, int trials, double tol,
                                             const Rng& rng) {
  const int n = emb.n();
  const std::string name = "rank_one_trace/" + zeta.description() + "/n" + std::to_string(n);
  if (n < 3) return detail::refused(name, "hypothesis n >= 3 not met");
  if (!zeta.continuous()) return detail::refused(name, "hypothesis: zeta must be continuous");
  const int unknowns = n * n;
  const int samples = std::max(trials, 10 * unknowns);
  const int train = detail::train_count(samples);
  Mat design(samples, unknowns);
  Vec target(samples);
  for (int s = 0; s < samples; ++s) {
    Rng trng = rng.split(static_cast<std::uint64_t>(s));
    const Vec xi = random_vector(n, trng), eta = random_vector(n, trng);
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) design(s, i * n + jj) = eta(i) * xi(jj);
    target(s) = zeta(emb.embed(rank_one_gl(xi, eta)));
  }
  const auto fit = detail::fit_split(design, target, train);
  VerificationReport r;
  r.check_name = name;
  for (double d : fit.held_out_abs) r.add_trial(d, tol);
  Mat nm(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) nm(i, jj) = fit.coef(i * n + jj);
  r.fitted_matrices["N"] = nm;
  r.fitted["train_rms"] = fit.train_rms;
  r.fitted["samples"] = samples;
  r.finalize();
  return r;
}

/// Draws eta1, eta2 with omega(eta1, eta2) = 0: eta2 loses its component
/// along J0 eta1, the symplectic partner of eta1.
inline std::pair<Vec, Vec> isotropic_pair(const SymplecticSpace& sp, Rng& rng) {
  const Vec e1 = random_vector(sp.dim(), rng);
  Vec e2 = random_vector(sp.dim(), rng);
  const Vec partner = standard_j(sp.n()) * e1;
  e2 -= (sp.omega(e1, e2) / sp.omega(e1, partner)) * partner;
  return {e1, e2};
}

/// phi(c1 eta1 + c2 eta2) = c1 phi(eta1) + c2 phi(eta2) whenever omega(eta1, eta2) = 0.
inline VerificationReport check_isotropic_linearity(const std::function<double(const Vec&)>& phi,
                                                    const SymplecticSpace& sp, int trials, double tol,
                                                    const Rng& rng, std::string label = "phi",
                                                    bool expect_failure = false) {
  const std::string name = "isotropic_linearity/" + label + "/n" + std::to_string(sp.n());
  if (sp.n() < 2) return detail::refused(name, "hypothesis n >= 2 not met");
  VerificationReport r;
  r.check_name = name;
  r.expect_failure = expect_failure;
  for (int k = 0; k < trials; ++k) {
    Rng trng = rng.split(static_cast<std::uint64_t>(k));
    const auto [e1, e2] = isotropic_pair(sp, trng);
    const double c1 = trng.uniform(-2.0, 2.0), c2 = trng.uniform(-2.0, 2.0);
    const double defect = std::abs(phi(c1 * e1 + c2 * e2) - c1 * phi(e1) - c2 * phi(e2));
    r.add_trial(defect, tol);
  }
  r.finalize();
  return r;
}

struct MainFitOptions {
  double cone_margin = 0.1;  ///< reject samples with |omega(xi, eta)| < margin |xi| |eta|
  double element_scale = 1.0;
  std::optional<double> expected_coefficient;  ///< adds a trial |maslov_coefficient - expected|
};

/// Fits F(xi + i eta) = omega(C xi, xi) + omega(C eta, eta) + kappa |omega(xi, eta)|
/// with C in sp(2n), checks G(xi, eta) = 2 omega(C xi, eta), and predicts
/// zeta(B) = -tr(C B) - kappa zeta_M(B) through the Y/Z splitting of B.
/// Fitted keys: omega_abs_coefficient = kappa, maslov_coefficient = -kappa.
inline VerificationReport fit_main_theorem(const QuasiState& zeta, const SymplecticSpace& sp, double tol,
                                           const Rng& rng, const MainFitOptions& opt = {}) {
  const int n = sp.n();
  const int dim = sp.dim();
  VerificationReport r;
  r.check_name = "main_theorem/" + zeta.description() + "/n" + std::to_string(n);
  if (!zeta.continuous()) return detail::refused(r.check_name, "hypothesis: zeta must be continuous");
  if (n < 3) r.notes.push_back("n < 3: the one-dimensionality statement is not claimed; fit run as a diagnostic");

  // symmetric S parametrizes C = Omega^{-1} S in sp(2n); omega(C x, x) = -x^T S x
  std::vector<std::pair<int, int>> sym_index;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) sym_index.emplace_back(a, b);
  const int sym_count = static_cast<int>(sym_index.size());
  const int unknowns = sym_count + 1;
  const int samples = 10 * unknowns;
  const int train = detail::train_count(samples);
  const int fresh = samples - train;

  auto quad_row = [&](const Vec& x, Mat& m, int row) {
    for (int k = 0; k < sym_count; ++k) {
      const auto [a, b] = sym_index[k];
      m(row, k) += a == b ? -x(a) * x(a) : -2.0 * x(a) * x(b);
    }
  };
  auto draw_cone_pair = [&](Rng& trng) {
    for (;;) {
      Vec xi = random_vector(dim, trng), eta = random_vector(dim, trng);
      if (std::abs(sp.omega(xi, eta)) >= opt.cone_margin * xi.norm() * eta.norm()) return std::make_pair(xi, eta);
    }
  };

  Mat design = Mat::Zero(samples, unknowns);
  Vec target(samples);
  int in_w = 0;
  for (int s = 0; s < samples; ++s) {
    Rng trng = rng.split(static_cast<std::uint64_t>(s));
    const auto [xi, eta] = draw_cone_pair(trng);
    quad_row(xi, design, s);
    quad_row(eta, design, s);
    const double w = sp.omega(xi, eta);
    in_w += w > 0;
    design(s, sym_count) = std::abs(w);
    target(s) = zeta(realize(y_desc(xi, eta)));
  }
  const auto fit = detail::fit_split(design, target, train);
  Mat s_mat = Mat::Zero(dim, dim);
  for (int k = 0; k < sym_count; ++k) {
    const auto [a, b] = sym_index[k];
    s_mat(a, b) = fit.coef(k);
    s_mat(b, a) = fit.coef(k);
  }
  const Mat c_mat = -sp.omega_matrix() * s_mat;  // Omega^{-1} S
  const double kappa = fit.coef(sym_count);

  double stage1 = 0.0, stage2 = 0.0, stage3 = 0.0;
  for (double d : fit.held_out_abs) {
    stage1 = std::max(stage1, d);
    r.add_trial(d, tol);
  }

  const Rng rng2 = rng.split(1u << 20);
  for (int s = 0; s < fresh; ++s) {
    Rng trng = rng2.split(static_cast<std::uint64_t>(s));
    const Vec xi = random_vector(dim, trng), eta = random_vector(dim, trng);
    const double predicted = 2.0 * sp.omega(c_mat * xi, eta);
    const double d = std::abs(zeta(realize(z_desc(xi, eta))) - predicted);
    stage2 = std::max(stage2, d);
    r.add_trial(d, tol);
  }

  const Rng rng3 = rng.split(1u << 21);
  for (int s = 0; s < fresh; ++s) {
    Rng trng = rng3.split(static_cast<std::uint64_t>(s));
    const SpElement b = random_sp_element(sp, opt.element_scale, trng);
    const auto terms = yz_decomposition(b);
    double predicted = 0.0;
    for (const auto& t : terms) {
      const Mat m = realize_matrix(t.descriptor);
      double v = -(c_mat * m).trace();
      if (t.descriptor.kind == RankOneKind::Y) v += kappa * std::abs(sp.omega(t.descriptor.xi, t.descriptor.eta));
      predicted += t.coefficient * v;
    }
    const double d = std::abs(zeta(b) - predicted);
    stage3 = std::max(stage3, d);
    r.add_trial(d, tol);
  }

  if (opt.expected_coefficient) r.add_trial(std::abs(-kappa - *opt.expected_coefficient), tol);

  r.fitted["omega_abs_coefficient"] = kappa;
  r.fitted["maslov_coefficient"] = -kappa;
  r.fitted["stage1_held_out_residual"] = stage1;
  r.fitted["stage1_train_rms"] = fit.train_rms;
  r.fitted["stage2_residual"] = stage2;
  r.fitted["stage3_residual"] = stage3;
  r.fitted["samples_in_W"] = in_w;
  r.fitted["samples_in_W_minus"] = samples - in_w;
  r.fitted_matrices["C"] = c_mat;
  r.finalize();
  return r;
}

}  // namespace lqs
