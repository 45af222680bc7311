#pragma once

// Spectral classification and symplectic normal form of semi-simple
// elements of sp(2n, R), plus the pairwise-commuting Y/Z splitting of the
// normal form.
//
// Eigenvalues of a real Hamiltonian matrix come as real pairs +-a, imaginary
// pairs +-ib and quadruples +-a +-ib (plus zeros). Each cluster is turned
// into Darboux vectors:
//   real pair   e in ker(B + a), f in ker(B - a), omega(e, f) = 1
//   imag pair   v = u + iw in ker(B - ib); the Hermitian form
//               K(v, v') = conj(v)^T Omega v' / (2i) fixes the orientation,
//               e = u, f = sign(K) w, block parameter b * sign(K)
//   quadruple   v in ker(B - (-a + ib)), w in ker(B - (a + ib)) with
//               conj(v)^T Omega w = 2; e_k + i e_{k+1} = v, f_k + i f_{k+1} = w
//   zero        symplectic Gram-Schmidt on the real kernel.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lqs/error.hpp"
#include "lqs/symplectic.hpp"
#include "lqs/types.hpp"

namespace lqs {

enum class SpectralKind { zero, real_pair, imaginary_pair, quadruple };

inline const char* to_string(SpectralKind k) {
  switch (k) {
    case SpectralKind::zero: return "zero";
    case SpectralKind::real_pair: return "real_pair";
    case SpectralKind::imaginary_pair: return "imaginary_pair";
    case SpectralKind::quadruple: return "quadruple";
  }
  return "?";
}

/// One group of equal eigenvalues, reported by its canonical representative:
/// zero -> 0; real pair -> a > 0 (eigenvalues +-a); imaginary pair -> b > 0
/// (eigenvalues +-ib); quadruple -> a, b > 0 (eigenvalues +-a +-ib).
struct SpectralCluster {
  SpectralKind kind = SpectralKind::zero;
  double a = 0.0;
  double b = 0.0;
  /// zero: kernel dimension; otherwise the number of pairs / quadruples.
  int multiplicity = 0;
  /// Imaginary pairs only: signature of the Krein form on ker(B - ib).
  int krein_positive = 0;
  int krein_negative = 0;
  int first_index = 0;  ///< smallest eigenvalue index in the solver output
};

struct SpectrumReport {
  std::vector<SpectralCluster> clusters;
  bool semisimple = false;
  double eigenvector_condition = 0.0;
  double eigen_residual = 0.0;  ///< max ||(B - mu) V|| over clusters, relative to 1 + ||B||
  int zero_count = 0;
};

struct ClassificationTolerances {
  double axis = 1e-8;           ///< |Re mu| <= axis * (1 + |mu|) counts as imaginary (and symmetrically)
  double ambiguity_factor = 100.0;
  double cluster = 1e-6;        ///< eigenvalues closer than cluster * (1 + ||B||) are merged
  double residual = 1e-6;       ///< null-space residual bound, relative to 1 + ||B||
  double max_condition = 1e8;   ///< eigenvector matrix condition bound for semi-simplicity
};

namespace detail {

struct ClusterBasis {
  SpectralCluster info;
  CMat v;  ///< zero: kernel; real: ker(B + a); imag: ker(B - ib); quad: ker(B - (-a + ib))
  CMat w;  ///< real: ker(B - a); quad: ker(B - (a + ib))
};

struct EigenStructure {
  SpectrumReport report;
  std::vector<ClusterBasis> bases;
};

// Orthonormal basis of the m-dimensional (approximate) null space of `m`, and
// the largest singular value discarded into it.
inline CMat null_space(const CMat& m, int dim, double* residual) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto cols = m.cols();
  const Vec s = svd.singularValues();
  *residual = dim > 0 ? s(cols - dim) : 0.0;
  CMat v = svd.matrixV().rightCols(dim);
  return v;
}

inline Mat real_null_space(const Mat& m, int dim, double* residual) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto cols = m.cols();
  *residual = dim > 0 ? svd.singularValues()(cols - dim) : 0.0;
  return svd.matrixV().rightCols(dim);
}

// Rotates each column so its largest-modulus entry is real positive
// (first index wins ties); gives reproducible frames for fixed inputs.
inline void canonical_phase(CMat& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > mag * (1.0 + 1e-9)) {
        mag = std::abs(v(i, j));
        best = i;
      }
    }
    if (mag > 0.0) v.col(j) *= std::conj(v(best, j)) / mag;
  }
}

inline EigenStructure analyze(const Mat& b, const ClassificationTolerances& tol) {
  const int n2 = static_cast<int>(b.rows());
  const double bnorm = b.norm();
  Eigen::EigenSolver<Mat> es(b, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::numerical, "eigenvalue solver failed");
  const CVec lam = es.eigenvalues();

  // union-find clustering of nearby eigenvalues
  std::vector<int> parent(n2);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const double ctol = tol.cluster * (1.0 + bnorm);
  for (int i = 0; i < n2; ++i)
    for (int j = i + 1; j < n2; ++j)
      if (std::abs(lam(i) - lam(j)) <= ctol) parent[find(i)] = find(j);

  struct Raw {
    Complex center;
    int size = 0;
    int first = 0;
  };
  std::vector<Raw> raw;
  std::vector<int> slot(n2, -1);
  for (int i = 0; i < n2; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(raw.size());
      raw.push_back({Complex(0.0, 0.0), 0, i});
    }
    auto& c = raw[slot[r]];
    c.center += lam(i);
    c.size += 1;
  }
  for (auto& c : raw) c.center /= static_cast<double>(c.size);

  EigenStructure out;
  auto& rep = out.report;
  const double ztol = tol.axis * (1.0 + bnorm);
  auto on_imag_axis = [&](Complex mu) { return std::abs(mu.real()) <= tol.axis * (1.0 + std::abs(mu)); };
  auto on_real_axis = [&](Complex mu) { return std::abs(mu.imag()) <= tol.axis * (1.0 + std::abs(mu)); };
  auto near = [&](double x, Complex mu) { return x <= tol.ambiguity_factor * tol.axis * (1.0 + std::abs(mu)); };
  auto find_partner = [&](Complex target, int size) -> const Raw* {
    for (const auto& c : raw)
      if (c.size == size && std::abs(c.center - target) <= 10.0 * ctol) return &c;
    return nullptr;
  };

  const Mat omega = SymplecticSpace(n2 / 2).omega_matrix();
  const CMat bc = b.cast<Complex>();
  const CMat id = CMat::Identity(n2, n2);
  double worst_residual = 0.0;
  std::vector<CMat> all_vectors;
  int covered = 0;
  bool structure_ok = true;

  for (const auto& c : raw) {
    const Complex mu = c.center;
    ClusterBasis cb;
    cb.info.first_index = c.first;
    double res = 0.0;
    if (std::abs(mu) <= ztol) {
      cb.info.kind = SpectralKind::zero;
      cb.info.multiplicity = c.size;
      cb.v = real_null_space(b, c.size, &res).cast<Complex>();
      worst_residual = std::max(worst_residual, res);
      all_vectors.push_back(cb.v);
      covered += c.size;
    } else if (on_imag_axis(mu)) {
      if (mu.imag() < 0.0) continue;  // handled through the conjugate cluster
      cb.info.kind = SpectralKind::imaginary_pair;
      cb.info.b = mu.imag();
      cb.info.multiplicity = c.size;
      cb.v = null_space(bc - Complex(0.0, cb.info.b) * id, c.size, &res);
      canonical_phase(cb.v);
      worst_residual = std::max(worst_residual, res);
      all_vectors.push_back(cb.v);
      all_vectors.push_back(cb.v.conjugate());
      covered += 2 * c.size;
    } else if (on_real_axis(mu)) {
      if (mu.real() > 0.0) continue;  // handled through the -a cluster
      cb.info.kind = SpectralKind::real_pair;
      cb.info.a = -mu.real();
      cb.info.multiplicity = c.size;
      if (!find_partner(Complex(cb.info.a, 0.0), c.size)) {
        structure_ok = false;
        continue;
      }
      double res2 = 0.0;
      const Mat id_r = Mat::Identity(n2, n2);
      cb.v = real_null_space(b + cb.info.a * id_r, c.size, &res).cast<Complex>();
      cb.w = real_null_space(b - cb.info.a * id_r, c.size, &res2).cast<Complex>();
      canonical_phase(cb.v);
      canonical_phase(cb.w);
      worst_residual = std::max({worst_residual, res, res2});
      all_vectors.push_back(cb.v);
      all_vectors.push_back(cb.w);
      covered += 2 * c.size;
    } else {
      if (!(mu.real() < 0.0 && mu.imag() > 0.0)) continue;  // one representative per quadruple
      cb.info.kind = SpectralKind::quadruple;
      cb.info.a = -mu.real();
      cb.info.b = mu.imag();
      cb.info.multiplicity = c.size;
      if (!find_partner(Complex(cb.info.a, cb.info.b), c.size)) {
        structure_ok = false;
        continue;
      }
      double res2 = 0.0;
      cb.v = null_space(bc - Complex(-cb.info.a, cb.info.b) * id, c.size, &res);
      cb.w = null_space(bc - Complex(cb.info.a, cb.info.b) * id, c.size, &res2);
      canonical_phase(cb.v);
      worst_residual = std::max({worst_residual, res, res2});
      all_vectors.push_back(cb.v);
      all_vectors.push_back(cb.v.conjugate());
      all_vectors.push_back(cb.w);
      all_vectors.push_back(cb.w.conjugate());
      covered += 4 * c.size;
    }
    out.bases.push_back(std::move(cb));
  }

  rep.eigen_residual = worst_residual / (1.0 + bnorm);
  if (structure_ok && covered == n2) {
    CMat v(n2, n2);
    Eigen::Index col = 0;
    for (const auto& blk : all_vectors) {
      v.middleCols(col, blk.cols()) = blk;
      col += blk.cols();
    }
    Eigen::JacobiSVD<CMat> svd(v);
    const Vec s = svd.singularValues();
    rep.eigenvector_condition = s(n2 - 1) > 0.0 ? s(0) / s(n2 - 1) : std::numeric_limits<double>::infinity();
  } else {
    rep.eigenvector_condition = std::numeric_limits<double>::infinity();
  }
  rep.semisimple = structure_ok && covered == n2 && rep.eigenvector_condition <= tol.max_condition &&
                   rep.eigen_residual <= tol.residual;

  if (rep.semisimple) {
    // Ambiguity check: an eigenvalue just outside an axis band is neither
    // cleanly on the axis nor cleanly off it.
    for (const auto& c : raw) {
      const Complex mu = c.center;
      if (std::abs(mu) <= ztol) continue;
      const bool im_ax = on_imag_axis(mu), re_ax = on_real_axis(mu);
      if ((!im_ax && near(std::abs(mu.real()), mu)) || (!re_ax && near(std::abs(mu.imag()), mu)))
        throw Error(ErrorKind::classification,
                    "eigenvalue " + std::to_string(mu.real()) + "+" + std::to_string(mu.imag()) +
                        "i lies in the ambiguous band next to an axis");
    }
    for (auto& cb : out.bases) {
      if (cb.info.kind != SpectralKind::imaginary_pair) continue;
      const CMat k = (cb.v.adjoint() * omega.cast<Complex>() * cb.v) / Complex(0.0, 2.0);
      Eigen::SelfAdjointEigenSolver<CMat> ks(0.5 * (k + k.adjoint()));
      const Vec kl = ks.eigenvalues();
      const double scale = kl.cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < kl.size(); ++i) {
        if (std::abs(kl(i)) <= 1e-10 * std::max(scale, 1e-300))
          throw Error(ErrorKind::classification, "Krein form is degenerate on an imaginary eigenspace");
        (kl(i) > 0 ? cb.info.krein_positive : cb.info.krein_negative) += 1;
      }
    }
  }

  for (const auto& cb : out.bases) {
    rep.clusters.push_back(cb.info);
    if (cb.info.kind == SpectralKind::zero) rep.zero_count += cb.info.multiplicity;
  }
  return out;
}

}  // namespace detail

inline SpectrumReport classify_eigenstructure(const SpElement& b, const ClassificationTolerances& tol = {}) {
  return detail::analyze(b.mat(), tol).report;
}

enum class BlockType { real_pair, imaginary_pair, quadruple };

inline const char* to_string(BlockType t) {
  switch (t) {
    case BlockType::real_pair: return "real_pair";
    case BlockType::imaginary_pair: return "imaginary_pair";
    case BlockType::quadruple: return "quadruple";
  }
  return "?";
}

/// One normal-form block in the (e, f) basis of its Darboux planes:
///   real_pair(a)       [[-a, 0], [0, a]]             one plane
///   imaginary_pair(b)  [[0, b], [-b, 0]]             one plane; sign of b is the Krein orientation
///   quadruple(a, b)    [[-a, b, 0, 0], [-b, -a, 0, 0], [0, 0, a, b], [0, 0, -b, a]]   planes k, k+1
/// Zero eigenvalues appear as real_pair(0).
struct WilliamsonBlock {
  BlockType type = BlockType::real_pair;
  double a = 0.0;
  double b = 0.0;
  std::vector<int> planes;  ///< 0-based Darboux plane indices
};

/// Writes `blk` into the block-diagonal matrix `d` (standard Darboux frame).
inline void place_block(Mat& d, int n, const WilliamsonBlock& blk) {
  const int k = blk.planes.at(0);
  switch (blk.type) {
    case BlockType::real_pair:
      d(k, k) = -blk.a;
      d(n + k, n + k) = blk.a;
      break;
    case BlockType::imaginary_pair:
      d(k, n + k) = blk.b;
      d(n + k, k) = -blk.b;
      break;
    case BlockType::quadruple: {
      const int l = blk.planes.at(1);
      const int idx[4] = {k, l, n + k, n + l};
      const double m[4][4] = {{-blk.a, blk.b, 0, 0}, {-blk.b, -blk.a, 0, 0}, {0, 0, blk.a, blk.b}, {0, 0, -blk.b, blk.a}};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) d(idx[i], idx[j]) = m[i][j];
      break;
    }
  }
}

inline Mat assemble_blocks(int n, const std::vector<WilliamsonBlock>& blocks) {
  Mat d = Mat::Zero(2 * n, 2 * n);
  for (const auto& blk : blocks) place_block(d, n, blk);
  return d;
}

struct WilliamsonDecomposition {
  Mat S;  ///< columns e_1..e_n, f_1..f_n of a Darboux frame
  std::vector<WilliamsonBlock> blocks;
  double reconstruction_residual = 0.0;  ///< ||S D S^{-1} - B||_F / max(||B||_F, tiny)
  double symplectic_defect = 0.0;        ///< ||S^T Omega S - Omega||_max

  int n() const { return static_cast<int>(S.rows() / 2); }
  Mat block_diagonal() const { return assemble_blocks(n(), blocks); }
  Mat reconstruct() const { return S * block_diagonal() * symplectic_inverse(S); }
};

namespace detail {

// Darboux basis of a symplectic subspace given by an orthonormal real basis,
// preferring directions close to the coordinate axes.
inline std::vector<std::pair<Vec, Vec>> darboux_basis(const Mat& k, const SymplecticSpace& sp) {
  const int dim = static_cast<int>(k.cols());
  const Mat proj = k * k.transpose();
  // orthonormal basis built from projected coordinate vectors, in coordinate order
  std::vector<Vec> picked;
  std::vector<bool> used(proj.cols(), false);
  while (static_cast<int>(picked.size()) < dim) {
    std::vector<Vec> resid(proj.cols());
    double best = 0.0;
    for (Eigen::Index j = 0; j < proj.cols(); ++j) {
      if (used[j]) continue;
      Vec r = proj.col(j);
      for (const auto& p : picked) r -= p.dot(r) * p;
      resid[j] = r;
      best = std::max(best, r.norm());
    }
    for (Eigen::Index j = 0; j < proj.cols(); ++j) {
      if (used[j] || resid[j].norm() < 0.5 * best) continue;
      used[j] = true;
      picked.push_back(resid[j].normalized());
      break;
    }
  }
  std::vector<std::pair<Vec, Vec>> pairs;
  while (!picked.empty()) {
    Vec e = picked.front();
    picked.erase(picked.begin());
    std::size_t best = 0;
    double bw = -1.0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
      const double w = std::abs(sp.omega(e, picked[i]));
      if (w > bw * (1.0 + 1e-9)) {
        bw = w;
        best = i;
      }
    }
    if (picked.empty() || bw <= 1e-12)
      throw Error(ErrorKind::numerical, "kernel is not a symplectic subspace");
    Vec f = picked[best] / sp.omega(e, picked[best]);
    picked.erase(picked.begin() + static_cast<long>(best));
    for (auto& x : picked) x = x - sp.omega(x, f) * e + sp.omega(x, e) * f;
    pairs.emplace_back(std::move(e), std::move(f));
  }
  return pairs;
}

}  // namespace detail

/// Symplectic normal form of a semi-simple B: B = S D S^{-1}, D block diagonal.
/// Blocks are ordered by type (real, imaginary, quadruple), then by parameter
/// magnitude, then by eigenvalue index.
inline WilliamsonDecomposition williamson_decompose(const SpElement& b, const ClassificationTolerances& tol = {}) {
  const auto es = detail::analyze(b.mat(), tol);
  if (!es.report.semisimple)
    throw Error(ErrorKind::not_semisimple,
                "williamson_decompose: input is not semi-simple (eigenvector condition " +
                    std::to_string(es.report.eigenvector_condition) + ")");
  const SymplecticSpace sp(b.n());
  const int n = sp.n();
  const CMat omega = sp.omega_matrix().cast<Complex>();

  struct Piece {
    WilliamsonBlock block;
    std::vector<Vec> e, f;  // one or two planes
    double magnitude = 0.0;
    int first = 0;
  };
  std::vector<Piece> pieces;

  for (const auto& cb : es.bases) {
    const auto& info = cb.info;
    switch (info.kind) {
      case SpectralKind::zero: {
        for (auto& [e, f] : detail::darboux_basis(cb.v.real(), sp)) {
          Piece p{{BlockType::real_pair, 0.0, 0.0, {}}, {e}, {f}, 0.0, info.first_index};
          pieces.push_back(std::move(p));
        }
        break;
      }
      case SpectralKind::real_pair: {
        const Mat ev = cb.v.real();
        const Mat gv = cb.w.real();
        const Mat pairing = ev.transpose() * sp.omega_matrix() * gv;
        const Mat fv = gv * pairing.inverse();
        for (Eigen::Index j = 0; j < ev.cols(); ++j) {
          Piece p{{BlockType::real_pair, info.a, 0.0, {}}, {ev.col(j)}, {fv.col(j)}, info.a, info.first_index};
          pieces.push_back(std::move(p));
        }
        break;
      }
      case SpectralKind::imaginary_pair: {
        const CMat k = (cb.v.adjoint() * omega * cb.v) / Complex(0.0, 2.0);
        Eigen::SelfAdjointEigenSolver<CMat> ks(0.5 * (k + k.adjoint()));
        const Vec kl = ks.eigenvalues();
        CMat vv = cb.v * ks.eigenvectors();
        for (Eigen::Index j = 0; j < vv.cols(); ++j) {
          const double s = kl(j) > 0 ? 1.0 : -1.0;
          const CVec v = vv.col(j) / std::sqrt(std::abs(kl(j)));
          Piece p{{BlockType::imaginary_pair, 0.0, s * info.b, {}}, {v.real()}, {s * v.imag()}, info.b,
                  info.first_index};
          pieces.push_back(std::move(p));
        }
        break;
      }
      case SpectralKind::quadruple: {
        const CMat g = cb.v.adjoint() * omega * cb.w;
        const CMat w = cb.w * (2.0 * g.inverse());
        for (Eigen::Index j = 0; j < cb.v.cols(); ++j) {
          Piece p{{BlockType::quadruple, info.a, info.b, {}},
                  {cb.v.col(j).real(), cb.v.col(j).imag()},
                  {w.col(j).real(), w.col(j).imag()},
                  std::hypot(info.a, info.b),
                  info.first_index};
          pieces.push_back(std::move(p));
        }
        break;
      }
    }
  }

  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
    if (x.block.type != y.block.type) return x.block.type < y.block.type;
    if (x.magnitude != y.magnitude) return x.magnitude < y.magnitude;
    return x.first < y.first;
  });

  WilliamsonDecomposition out;
  out.S = Mat::Zero(2 * n, 2 * n);
  int plane = 0;
  for (auto& p : pieces) {
    for (std::size_t i = 0; i < p.e.size(); ++i) {
      if (plane >= n) throw Error(ErrorKind::numerical, "williamson_decompose: plane count mismatch");
      out.S.col(plane) = p.e[i];
      out.S.col(n + plane) = p.f[i];
      p.block.planes.push_back(plane++);
    }
    out.blocks.push_back(p.block);
  }
  if (plane != n) throw Error(ErrorKind::numerical, "williamson_decompose: plane count mismatch");

  out.symplectic_defect = symplectic_group_defect(out.S);
  const double bn = std::max(b.mat().norm(), 1e-300);
  out.reconstruction_residual = b.mat().norm() == 0.0 ? (out.reconstruct() - b.mat()).norm()
                                                      : (out.reconstruct() - b.mat()).norm() / bn;
  return out;
}

struct YZTerm {
  double coefficient = 0.0;
  RankOneDescriptor descriptor;
  int group = 0;  ///< index of the normal-form block this term came from
};

/// The four-term splitting of a single quadruple block (a, b) on the Darboux
/// vectors e_k, e_{k+1}, f_k, f_{k+1}.
inline std::vector<YZTerm> quadruple_terms(double a, double b, const Vec& ek, const Vec& el, const Vec& fk,
                                           const Vec& fl, int group = 0) {
  const double r = 1.0 / std::sqrt(2.0);
  return {
      {a, z_desc(ek, fk), group},
      {a, z_desc(el, fl), group},
      {-b, y_desc(r * (el - fk), r * (ek + fl)), group},
      {b, y_desc(r * (ek - fl), r * (el + fk)), group},
  };
}

/// B as a sum of Y/Z generators built on the columns of the normal-form frame.
/// Terms from different groups commute; inside a quadruple group the Z pair,
/// the Y pair, and the Z-sum against the Y-combination commute.
inline std::vector<YZTerm> yz_decomposition(const WilliamsonDecomposition& w) {
  const int n = w.n();
  std::vector<YZTerm> terms;
  int group = 0;
  for (const auto& blk : w.blocks) {
    const int k = blk.planes.at(0);
    const Vec ek = w.S.col(k), fk = w.S.col(n + k);
    switch (blk.type) {
      case BlockType::real_pair:
        if (blk.a != 0.0) terms.push_back({blk.a, z_desc(ek, fk), group});
        break;
      case BlockType::imaginary_pair:
        terms.push_back({blk.b, y_desc(ek, fk), group});
        break;
      case BlockType::quadruple: {
        const int l = blk.planes.at(1);
        for (auto& t : quadruple_terms(blk.a, blk.b, ek, w.S.col(l), fk, w.S.col(n + l), group))
          terms.push_back(std::move(t));
        break;
      }
    }
    ++group;
  }
  return terms;
}

inline std::vector<YZTerm> yz_decomposition(const SpElement& b) { return yz_decomposition(williamson_decompose(b)); }

inline Mat realize_terms(const std::vector<YZTerm>& terms, int n) {
  Mat m = Mat::Zero(2 * n, 2 * n);
  for (const auto& t : terms) m += t.coefficient * realize_matrix(t.descriptor);
  return m;
}

}  // namespace lqs
