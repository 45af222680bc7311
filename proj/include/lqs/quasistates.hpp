#pragma once

// Lie quasi-states on sp(2n, R): functionals that are linear on every
// commuting pair. One evaluator type covers every family built here.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lqs/error.hpp"
#include "lqs/maslov.hpp"
#include "lqs/random.hpp"
#include "lqs/symplectic.hpp"

namespace lqs {

enum class Provenance { linear, maslov, dim2_homogeneous, discontinuous, composite, control };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::linear: return "linear";
    case Provenance::maslov: return "maslov";
    case Provenance::dim2_homogeneous: return "dim2_homogeneous";
    case Provenance::discontinuous: return "discontinuous";
    case Provenance::composite: return "composite";
    case Provenance::control: return "control";
  }
  return "?";
}

struct Evaluation {
  double value = 0.0;
  double error_bar = 0.0;  ///< bound on |value - exact| reported by the evaluator
};

class QuasiState {
 public:
  using Evaluator = std::function<Evaluation(const SpElement&)>;

  QuasiState(Evaluator f, double eval_tolerance, bool continuous, Provenance provenance, std::string description)
      : f_(std::move(f)),
        eval_tolerance_(eval_tolerance),
        continuous_(continuous),
        provenance_(provenance),
        description_(std::move(description)) {}

  Evaluation evaluate(const SpElement& a) const { return f_(a); }
  double operator()(const SpElement& a) const { return f_(a).value; }

  /// Nominal evaluation accuracy promised by the constructor.
  double eval_tolerance() const { return eval_tolerance_; }
  bool continuous() const { return continuous_; }
  Provenance provenance() const { return provenance_; }
  const std::string& description() const { return description_; }

 private:
  Evaluator f_;
  double eval_tolerance_;
  bool continuous_;
  Provenance provenance_;
  std::string description_;
};

/// zeta(A) = tr(N A).
inline QuasiState linear_qs(const Mat& n_mat) {
  if (n_mat.rows() != n_mat.cols()) throw Error(ErrorKind::dimension, "linear_qs: N must be square");
  const double nn = n_mat.norm();
  return QuasiState(
      [n_mat, nn](const SpElement& a) {
        if (a.mat().rows() != n_mat.rows()) throw Error(ErrorKind::dimension, "linear_qs: size mismatch");
        const double v = (n_mat * a.mat()).trace();
        return Evaluation{v, 1e-14 * (1.0 + nn * a.norm())};
      },
      1e-14, true, Provenance::linear, "linear");
}

enum class MaslovMethod { auto_select, limit, spectral };

inline const char* to_string(MaslovMethod m) {
  switch (m) {
    case MaslovMethod::auto_select: return "auto";
    case MaslovMethod::limit: return "limit";
    case MaslovMethod::spectral: return "spectral";
  }
  return "?";
}

/// Spectral value with an error bar scaled by the eigenvector conditioning.
inline Evaluation maslov_spectral_evaluation(const SpElement& b) {
  const SpectrumReport rep = classify_eigenstructure(b);
  if (!rep.semisimple) throw Error(ErrorKind::not_semisimple, "maslov_spectral: input is not semi-simple");
  double total = 0.0;
  for (const auto& c : rep.clusters)
    if (c.kind == SpectralKind::imaginary_pair)
      total -= c.b * static_cast<double>(c.krein_positive - c.krein_negative);
  const double bar = 1e-12 * b.n() * (1.0 + b.norm()) * std::max(1.0, rep.eigenvector_condition);
  return {total, bar};
}

/// zeta_M. auto_select uses the spectral formula when the input is
/// semi-simple and falls back to the limit otherwise.
inline QuasiState maslov_qs(const MaslovLimitConfig& cfg = {}, MaslovMethod method = MaslovMethod::auto_select) {
  cfg.validate();
  return QuasiState(
      [cfg, method](const SpElement& a) -> Evaluation {
        if (method != MaslovMethod::limit) {
          try {
            return maslov_spectral_evaluation(a);
          } catch (const Error& e) {
            if (method == MaslovMethod::spectral) throw;
          }
        }
        const auto est = maslov_limit(a, cfg);
        return {est.value, est.error_bar};
      },
      cfg.tol, true, Provenance::maslov, std::string("maslov/") + to_string(method));
}

/// zeta(A) = sum_i c_i zeta_i(A).
inline QuasiState combine(std::vector<std::pair<double, QuasiState>> parts, std::string description = "composite") {
  bool cont = true;
  double tol = 0.0;
  for (const auto& [c, q] : parts) {
    cont = cont && q.continuous();
    tol += std::abs(c) * q.eval_tolerance();
  }
  return QuasiState(
      [parts](const SpElement& a) {
        Evaluation out;
        for (const auto& [c, q] : parts) {
          if (c == 0.0) continue;
          const auto e = q.evaluate(a);
          out.value += c * e.value;
          out.error_bar += std::abs(c) * e.error_bar;
        }
        return out;
      },
      tol, cont, Provenance::composite, std::move(description));
}

/// Negative control: the Frobenius norm is not a quasi-state.
inline QuasiState norm_functional() {
  return QuasiState([](const SpElement& a) { return Evaluation{a.norm(), 0.0}; }, 0.0, true, Provenance::control,
                    "frobenius_norm");
}

/// zeta(A) = |A| f(A / |A|) on sp(2, R), |.| the Frobenius norm. Any two
/// commuting elements of sp(2, R) are proportional, so an odd f suffices.
inline QuasiState dim2_homogeneous_qs(std::function<double(const SpElement&)> f, std::uint64_t check_seed = 0x5eed) {
  Rng rng(check_seed);
  const SymplecticSpace sp(1);
  for (int i = 0; i < 64; ++i) {
    SpElement u = random_sp_element(sp, 1.0, rng);
    u = (1.0 / u.norm()) * u;
    const double fp = f(u), fm = f(-u);
    if (std::abs(fp + fm) > 1e-12 * (1.0 + std::abs(fp)))
      throw Error(ErrorKind::precondition, "dim2_homogeneous_qs: f is not odd on sampled antipodal pairs");
  }
  return QuasiState(
      [f = std::move(f)](const SpElement& a) {
        if (a.n() != 1) throw Error(ErrorKind::precondition, "dim2_homogeneous_qs: defined on sp(2, R) only");
        const double r = a.norm();
        if (r == 0.0) return Evaluation{0.0, 0.0};
        return Evaluation{r * f((1.0 / r) * a), 1e-14 * (1.0 + r)};
      },
      1e-14, true, Provenance::dim2_homogeneous, "dim2_homogeneous");
}

inline std::vector<double> singular_values(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

/// A skew-symplectic matrix whose Jordan form is one 2n x 2n block with
/// eigenvalue 0: [[S, E_nn], [0, -S^T]] with S the upper shift, giving the
/// chain f_1 -> -f_2 -> ... -> +-f_n -> +-e_n -> ... -> +-e_1 -> 0.
inline SpElement nilpotent_jordan_sp(const SymplecticSpace& sp) {
  const int n = sp.n();
  Mat a = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = 1.0;
    a(n + i + 1, n + i) = -1.0;
  }
  a(n - 1, 2 * n - 1) = 1.0;
  const SpElement out = SpElement::from_matrix(a, 1e-14);
  Mat pw = Mat::Identity(2 * n, 2 * n);
  for (int k = 1; k < 2 * n; ++k) pw = pw * a;
  if (max_abs(pw) < 0.5 || max_abs(pw * a) > 1e-12)
    throw Error(ErrorKind::numerical, "nilpotent_jordan_sp: self-check failed");
  return out;
}

/// zeta(x) = c a_1 when x = a_1 A + a_3 A^3 + ... + a_{2n-1} A^{2n-1}, else 0.
/// Membership is decided by a least-squares fit with a relative residual threshold.
class DiscontinuousQS {
 public:
  DiscontinuousQS(const SpElement& a, double c, double membership_rtol = 1e-8, double max_gram_condition = 1e12)
      : a_(a), c_(c), rtol_(membership_rtol) {
    const int n = a.n();
    const int dim = 2 * n;
    const Mat& m = a.mat();
    Mat pw = m;
    for (int k = 1; k < dim; ++k) pw = pw * m;
    const double an = std::max(m.norm(), 1e-300);
    if (pw.norm() > 1e-8 * std::pow(an, dim))
      throw Error(ErrorKind::precondition, "discontinuous_qs: A^{2n} != 0");
    Mat top = Mat::Identity(dim, dim);
    for (int k = 1; k < dim; ++k) top = top * m;
    const auto s = singular_values(top);
    if (!(s[0] > 1e-10 * std::pow(an, dim - 1)) || (s.size() > 1 && s[1] > 1e-8 * s[0]))
      throw Error(ErrorKind::precondition, "discontinuous_qs: A^{2n-1} does not have rank one");

    powers_ = Mat(dim * dim, n);
    const Mat sq = m * m;
    Mat p = m;
    for (int i = 0; i < n; ++i) {
      powers_.col(i) = Eigen::Map<const Vec>(p.data(), p.size());
      p = p * sq;
    }
    const Mat gram = powers_.transpose() * powers_;
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    gram_condition_ = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    if (!(es.eigenvalues().minCoeff() > 0.0) || gram_condition_ > max_gram_condition)
      throw Error(ErrorKind::precondition, "discontinuous_qs: power basis is ill-conditioned");
    qr_ = Eigen::ColPivHouseholderQR<Mat>(powers_);
    const Mat pinv = gram.inverse() * powers_.transpose();
    bound_ = std::abs(c_) * pinv.row(0).norm();
  }

  /// Coefficients (a_1, a_3, ...) when x lies in L, nothing otherwise.
  std::optional<Vec> coefficients(const SpElement& x) const {
    const Vec v = Eigen::Map<const Vec>(x.mat().data(), x.mat().size());
    const double xn = v.norm();
    if (xn == 0.0) return Vec::Zero(powers_.cols());
    Vec coef = qr_.solve(v);
    if ((powers_ * coef - v).norm() > rtol_ * xn) return std::nullopt;
    return coef;
  }

  double operator()(const SpElement& x) const {
    const auto coef = coefficients(x);
    return coef ? c_ * (*coef)(0) : 0.0;
  }

  /// |zeta(x)| <= bound() * |x|_F for every x.
  double bound() const { return bound_; }
  double gram_condition() const { return gram_condition_; }
  const SpElement& generator() const { return a_; }
  double c() const { return c_; }

 private:
  SpElement a_;
  double c_;
  double rtol_;
  Mat powers_;
  Eigen::ColPivHouseholderQR<Mat> qr_;
  double bound_ = 0.0;
  double gram_condition_ = 0.0;
};

inline QuasiState as_quasi_state(std::shared_ptr<const DiscontinuousQS> d) {
  return QuasiState([d](const SpElement& x) { return Evaluation{(*d)(x), 0.0}; }, 0.0, false,
                    Provenance::discontinuous, "discontinuous");
}

inline QuasiState discontinuous_qs(const SpElement& a, double c) {
  return as_quasi_state(std::make_shared<const DiscontinuousQS>(a, c));
}

}  // namespace lqs
