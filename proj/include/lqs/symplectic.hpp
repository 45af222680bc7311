#pragma once

// The standard symplectic space (R^{2n}, omega) in (p_1..p_n, q_1..q_n)
// coordinates, membership in sp(2n, R), the rank-one operators T/Y/Z and
// seeded generators of test inputs.

#include <string>
#include <utility>
#include <vector>

#include "lqs/error.hpp"
#include "lqs/matrix_analysis.hpp"
#include "lqs/random.hpp"
#include "lqs/types.hpp"

namespace lqs {

/// omega(x, y) = x^T Omega y with Omega = [[0, I], [-I, 0]].
class SymplecticSpace {
 public:
  explicit SymplecticSpace(int n) : n_(n) {
    if (n < 1) throw Error(ErrorKind::precondition, "SymplecticSpace: n must be positive");
    omega_ = Mat::Zero(2 * n, 2 * n);
    omega_.topRightCorner(n, n) = Mat::Identity(n, n);
    omega_.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  }

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  const Mat& omega_matrix() const { return omega_; }

  double omega(const Vec& x, const Vec& y) const {
    if (x.size() != dim() || y.size() != dim())
      throw Error(ErrorKind::dimension, "omega: vectors must have dimension 2n");
    return x.dot(omega_ * y);
  }

  /// Darboux basis vectors, 0-based: e(i) = p_i direction, f(i) = q_i direction.
  Vec e(int i) const { return Vec::Unit(dim(), i); }
  Vec f(int i) const { return Vec::Unit(dim(), n_ + i); }

  bool operator==(const SymplecticSpace& o) const { return n_ == o.n_; }

 private:
  int n_;
  Mat omega_;
};

inline int half_dim(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0)
    throw Error(ErrorKind::dimension, "expected a nonempty 2n x 2n matrix");
  return static_cast<int>(a.rows() / 2);
}

/// A^omega = Omega^{-1} A^T Omega, the adjoint with respect to omega.
inline Mat omega_adjoint(const Mat& a) {
  const int n = half_dim(a);
  // Omega^{-1} = -Omega, so the product is assembled blockwise.
  const auto at = a.transpose();
  Mat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = at.bottomRightCorner(n, n);
  r.topRightCorner(n, n) = -at.bottomLeftCorner(n, n);
  r.bottomLeftCorner(n, n) = -at.topRightCorner(n, n);
  r.bottomRightCorner(n, n) = at.topLeftCorner(n, n);
  return r;
}

inline double skew_symplectic_defect(const Mat& a) { return max_abs(a + omega_adjoint(a)); }

/// Relative membership test: ||A + A^omega||_max <= rtol * max(1, ||A||_max).
inline bool is_skew_symplectic(const Mat& a, double rtol = 1e-10) {
  return skew_symplectic_defect(a) <= rtol * std::max(1.0, max_abs(a));
}

/// ||g^T Omega g - Omega||_max
inline double symplectic_group_defect(const Mat& g) {
  SymplecticSpace sp(half_dim(g));
  return max_abs(g.transpose() * sp.omega_matrix() * g - sp.omega_matrix());
}

/// g^{-1} = Omega^{-1} g^T Omega for symplectic g.
inline Mat symplectic_inverse(const Mat& g) { return omega_adjoint(g); }

/// An element of sp(2n, R). Construction projects onto the algebra, so the
/// stored matrix satisfies A = -A^omega up to rounding.
class SpElement {
 public:
  /// Accepts `a` if it is skew-symplectic within `rtol` (relative), then projects.
  static SpElement from_matrix(const Mat& a, double rtol = 1e-10) {
    half_dim(a);
    if (!is_skew_symplectic(a, rtol))
      throw Error(ErrorKind::not_in_algebra,
                  "matrix is not skew-symplectic (defect " + std::to_string(skew_symplectic_defect(a)) + ")");
    return project(a);
  }

  /// (A - A^omega) / 2 for an arbitrary 2n x 2n matrix.
  static SpElement project(const Mat& a) { return SpElement(0.5 * (a - omega_adjoint(a))); }

  static SpElement zero(int n) { return SpElement(Mat::Zero(2 * n, 2 * n)); }

  const Mat& mat() const { return mat_; }
  int n() const { return static_cast<int>(mat_.rows() / 2); }
  SymplecticSpace space() const { return SymplecticSpace(n()); }
  double norm() const { return mat_.norm(); }

  SpElement operator+(const SpElement& o) const { return SpElement(mat_ + o.mat_); }
  SpElement operator-(const SpElement& o) const { return SpElement(mat_ - o.mat_); }
  SpElement operator-() const { return SpElement(-mat_); }
  friend SpElement operator*(double s, const SpElement& a) { return SpElement(s * a.mat_); }

  /// g A g^{-1} for symplectic g.
  SpElement conjugated(const Mat& g) const { return project(g * mat_ * symplectic_inverse(g)); }

 private:
  explicit SpElement(Mat m) : mat_(std::move(m)) {}
  Mat mat_;
};

inline Mat bracket(const SpElement& a, const SpElement& b) { return commutator(a.mat(), b.mat()); }

enum class RankOneKind { T, Y, Z };

inline const char* to_string(RankOneKind k) {
  switch (k) {
    case RankOneKind::T: return "T";
    case RankOneKind::Y: return "Y";
    case RankOneKind::Z: return "Z";
  }
  return "?";
}

struct RankOneDescriptor {
  RankOneKind kind = RankOneKind::Y;
  Vec xi;
  Vec eta;
};

/// T_{xi,eta} x = omega(xi, x) eta, i.e. the matrix eta xi^T Omega.
inline Mat t_operator(const Vec& xi, const Vec& eta) {
  if (xi.size() != eta.size() || xi.size() % 2 != 0 || xi.size() == 0)
    throw Error(ErrorKind::dimension, "rank-one operator: vectors must share an even dimension");
  SymplecticSpace sp(static_cast<int>(xi.size() / 2));
  return eta * (sp.omega_matrix().transpose() * xi).transpose();
}

inline Mat y_operator(const Vec& xi, const Vec& eta) { return t_operator(xi, xi) + t_operator(eta, eta); }

inline Mat z_operator(const Vec& xi, const Vec& eta) { return t_operator(eta, xi) + t_operator(xi, eta); }

inline Mat realize_matrix(const RankOneDescriptor& d) {
  switch (d.kind) {
    case RankOneKind::T: return t_operator(d.xi, d.eta);
    case RankOneKind::Y: return y_operator(d.xi, d.eta);
    case RankOneKind::Z: return z_operator(d.xi, d.eta);
  }
  return {};
}

/// Realization as an algebra element; T is accepted only when xi == eta.
inline SpElement realize(const RankOneDescriptor& d) {
  if (d.kind == RankOneKind::T && d.xi != d.eta)
    throw Error(ErrorKind::not_in_algebra, "T_{xi,eta} with xi != eta is not skew-symplectic");
  return SpElement::project(realize_matrix(d));
}

inline RankOneDescriptor y_desc(Vec xi, Vec eta) { return {RankOneKind::Y, std::move(xi), std::move(eta)}; }
inline RankOneDescriptor z_desc(Vec xi, Vec eta) { return {RankOneKind::Z, std::move(xi), std::move(eta)}; }

/// A complex structure J with J^2 = -I and omega(., J.) symmetric positive-definite.
class CompatibleComplexStructure {
 public:
  explicit CompatibleComplexStructure(Mat j, double tol = 1e-10) : j_(std::move(j)) {
    const int n = half_dim(j_);
    const Mat id = Mat::Identity(2 * n, 2 * n);
    if (max_abs(j_ * j_ + id) > tol * std::max(1.0, max_abs(j_ * j_)))
      throw Error(ErrorKind::precondition, "complex structure: J^2 != -I");
    const Mat g = inner_product_matrix();
    if (max_abs(g - g.transpose()) > tol * std::max(1.0, max_abs(g)))
      throw Error(ErrorKind::precondition, "complex structure: omega(., J.) is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()));
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw Error(ErrorKind::precondition, "complex structure: omega(., J.) is not positive-definite");
  }

  const Mat& mat() const { return j_; }
  int n() const { return static_cast<int>(j_.rows() / 2); }

  /// Gram matrix of (x, y)_J = omega(x, J y).
  Mat inner_product_matrix() const {
    SymplecticSpace sp(n());
    return sp.omega_matrix() * j_;
  }

 private:
  Mat j_;
};

/// J0 e_i = f_i, J0 f_i = -e_i; omega(x, J0 x) = |x|^2.
inline CompatibleComplexStructure standard_complex_structure(const SymplecticSpace& sp) {
  return CompatibleComplexStructure(standard_j(sp.n()));
}

inline SpElement random_sp_element(const SymplecticSpace& sp, double scale, Rng& rng) {
  if (!(scale >= 0.0)) throw Error(ErrorKind::precondition, "random_sp_element: scale must be non-negative");
  Mat a(sp.dim(), sp.dim());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = scale * rng.uniform(-1.0, 1.0);
  return SpElement::project(a);
}

inline SpElement random_sp_element(const SymplecticSpace& sp, double scale, std::uint64_t seed) {
  Rng rng(seed);
  return random_sp_element(sp, scale, rng);
}

/// exp(A) for a random algebra element A of the given scale.
inline Mat random_symplectic_group_element(const SymplecticSpace& sp, double scale, Rng& rng) {
  const SpElement a = random_sp_element(sp, scale, rng);
  Mat g = expm(a.mat());
  const double defect = symplectic_group_defect(g);
  if (defect > 1e-8 * std::max(1.0, g.squaredNorm()))
    throw Error(ErrorKind::numerical, "random symplectic element: defect " + std::to_string(defect));
  return g;
}

inline Mat random_symplectic_group_element(const SymplecticSpace& sp, double scale, std::uint64_t seed) {
  Rng rng(seed);
  return random_symplectic_group_element(sp, scale, rng);
}

inline Vec random_vector(int dim, Rng& rng, double scale = 1.0) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = scale * rng.normal();
  return v;
}

enum class PairStrategy { common_frame, odd_polynomial };

inline const char* to_string(PairStrategy s) {
  return s == PairStrategy::common_frame ? "common_frame" : "odd_polynomial";
}

struct CommutingPair {
  SpElement a;
  SpElement b;
  double commutator_defect = 0.0;  ///< ||[A, B]||_max
};

struct CommutingPairOptions {
  double frame_scale = 0.5;  ///< scale of the conjugating symplectic matrix
  double coeff_scale = 1.5;
};

/// Draws a commuting pair (A, B).
///  - common_frame: per Darboux plane pick one kind (Y or Z); A and B are
///    combinations of those per-plane generators with independent
///    coefficients (possibly zero), conjugated by one random symplectic g.
///  - odd_polynomial: p(C), q(C) for random odd cubics p, q and a random C.
inline CommutingPair commuting_pair(const SymplecticSpace& sp, PairStrategy strategy, Rng& rng,
                                    const CommutingPairOptions& opt = {}) {
  Mat a = Mat::Zero(sp.dim(), sp.dim());
  Mat b = a;
  if (strategy == PairStrategy::common_frame) {
    for (int k = 0; k < sp.n(); ++k) {
      const Mat gen = rng.uniform() < 0.5 ? y_operator(sp.e(k), sp.f(k)) : z_operator(sp.e(k), sp.f(k));
      if (rng.uniform() < 0.8) a += opt.coeff_scale * rng.uniform(-1.0, 1.0) * gen;
      if (rng.uniform() < 0.8) b += opt.coeff_scale * rng.uniform(-1.0, 1.0) * gen;
    }
    const Mat g = random_symplectic_group_element(sp, opt.frame_scale, rng);
    const Mat gi = symplectic_inverse(g);
    a = g * a * gi;
    b = g * b * gi;
  } else {
    const Mat c = random_sp_element(sp, 1.0, rng).mat();
    const Mat c3 = c * c * c;
    a = rng.uniform(-1.0, 1.0) * c + 0.3 * rng.uniform(-1.0, 1.0) * c3;
    b = rng.uniform(-1.0, 1.0) * c + 0.3 * rng.uniform(-1.0, 1.0) * c3;
  }
  CommutingPair out{SpElement::project(a), SpElement::project(b), 0.0};
  out.commutator_defect = max_abs(bracket(out.a, out.b));
  const double bound = 1e-9 * (1.0 + max_abs(out.a.mat())) * (1.0 + max_abs(out.b.mat()));
  if (out.commutator_defect > bound)
    throw Error(ErrorKind::numerical, "commuting_pair: commutator defect " + std::to_string(out.commutator_defect));
  return out;
}

}  // namespace lqs
