#include <cmath>

#include <gtest/gtest.h>

#include "lqs/lqs.hpp"

using namespace lqs;

namespace {
const QuasiState& spectral() {
  static const QuasiState q = maslov_qs({}, MaslovMethod::spectral);
  return q;
}
Mat random_square(int dim, Rng& rng) {
  Mat m(dim, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1, 1);
  return m;
}
}  // namespace

TEST(QuasiLinearity, MaslovLinearAndControl) {
  for (int n = 1; n <= 3; ++n) {
    const SymplecticSpace sp(n);
    Rng aux(n);
    for (auto s : {PairStrategy::common_frame, PairStrategy::odd_polynomial}) {
      EXPECT_TRUE(check_quasi_linearity(spectral(), sp, s, 20, {0.0, 3.0}, Rng(10 + n)).pass);
      const auto lin = check_quasi_linearity(linear_qs(random_square(2 * n, aux)), sp, s, 20, {1e-10, 0}, Rng(20));
      EXPECT_TRUE(lin.pass);
      EXPECT_LE(lin.max_defect, 1e-10);
    }
    const auto ctl = check_quasi_linearity(norm_functional(), sp, PairStrategy::common_frame, 30, {1e-9, 0}, Rng(3));
    EXPECT_FALSE(ctl.pass);
    EXPECT_TRUE(ctl.as_expected());
  }
}

TEST(QuasiLinearity, DiscontinuousOnItsOwnGenerator) {
  for (int n = 1; n <= 3; ++n) {
    const auto a = nilpotent_jordan_sp(SymplecticSpace(n));
    const auto r = check_quasi_linearity(
        discontinuous_qs(a, 1.0), "own", [&](Rng& g) { return odd_polynomial_pair(a, g); }, 30, {1e-9, 0}, Rng(8));
    EXPECT_TRUE(r.pass) << r.max_defect;
  }
}

TEST(AdInvariance, MaslovPassesLinearFails) {
  for (int n : {1, 3}) {
    const SymplecticSpace sp(n);
    EXPECT_TRUE(check_ad_invariance(spectral(), sp, 20, {0, 2.0}, Rng(5)).pass);
    Rng aux(6);
    const auto r = check_ad_invariance(linear_qs(random_square(2 * n, aux)), sp, 20, {1e-9, 0}, Rng(5));
    EXPECT_FALSE(r.pass);
    EXPECT_TRUE(r.expect_failure);
  }
}

TEST(Gleason, RefusesSmallDimensionAndDiscontinuous) {
  const auto j1 = standard_complex_structure(SymplecticSpace(1));
  const auto q = dim2_homogeneous_qs([](const SpElement& u) { return std::pow(u.mat()(0, 1), 3); });
  const auto r = fit_gleason_on_unitary(q, j1, 1e-2, Rng(1));
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.pass);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_EQ(r.notes[0], "hypothesis n >= 3 not met");
  const auto j3 = standard_complex_structure(SymplecticSpace(3));
  const auto d = fit_gleason_on_unitary(discontinuous_qs(nilpotent_jordan_sp(SymplecticSpace(3)), 1.0), j3, 1e-2, Rng(1));
  EXPECT_FALSE(d.applicable);
}

TEST(Gleason, MaslovMatchesImaginaryTrace) {
  const auto j = standard_complex_structure(SymplecticSpace(3));
  const auto r = fit_gleason_on_unitary(spectral(), j, 1e-2, Rng(2));
  ASSERT_TRUE(r.pass);
  const auto o = compare_unitary_functional(r.fitted_matrices.at("H"), maslov_unitary_trace, j, 20, 1e-6, Rng(3));
  EXPECT_TRUE(o.pass) << o.max_defect;
  Rng aux(4);
  EXPECT_TRUE(fit_gleason_on_unitary(linear_qs(random_square(6, aux)), j, 1e-10, Rng(5)).pass);
}

TEST(GlEmbedding, IdentityBracketsAndRankOne) {
  const SymplecticSpace sp(3);
  Rng rng(13);
  const auto emb = embed_gl(sp, rng);
  const Mat id = emb.embed(Mat::Identity(3, 3)).mat();
  EXPECT_LT(max_abs(id * emb.l1() - emb.l1()), 1e-10);
  EXPECT_LT(max_abs(id * emb.l2() + emb.l2()), 1e-10);
  for (int k = 0; k < 20; ++k) {
    const Mat m1 = random_square(3, rng), m2 = random_square(3, rng);
    const Mat lhs = bracket(emb.embed(m1), emb.embed(m2));
    const Mat rhs = emb.embed(commutator(m1, m2)).mat();
    EXPECT_LT(max_abs(lhs - rhs), 1e-9);
  }
  const Vec xi = random_vector(3, rng), eta = random_vector(3, rng);
  const auto r1 = emb.embed(rank_one_gl(xi, eta));
  // rank one as an endomorphism of L1
  Eigen::JacobiSVD<Mat> svd(emb.restrict_to_l1(r1));
  EXPECT_LT(svd.singularValues()(1), 1e-10 * svd.singularValues()(0));
  EXPECT_LT(max_abs(emb.restrict_to_l1(r1) - rank_one_gl(xi, eta)), 1e-10);
  // xi eta^T corresponds to Z_{g(xi;0), g(0;-eta)}
  Vec u = Vec::Zero(6), v = Vec::Zero(6);
  u.head(3) = xi;
  v.tail(3) = -eta;
  EXPECT_LT(max_abs(r1.mat() - z_operator(emb.frame() * u, emb.frame() * v)), 1e-10);
  // scale test: doubling xi doubles the value
  const QuasiState lin = linear_qs(random_square(6, rng));
  EXPECT_NEAR(lin(emb.embed(rank_one_gl(2 * xi, eta))), 2 * lin(emb.embed(rank_one_gl(xi, eta))), 1e-12);
}

TEST(RankOneTrace, LinearAndMaslov) {
  const SymplecticSpace sp(3);
  Rng rng(17);
  const auto emb = embed_gl(sp, rng);
  const auto lin = linear_qs(random_square(6, rng));
  EXPECT_TRUE(fit_rank_one_trace(lin, emb, 50, 1e-9, Rng(1)).pass);
  const auto m = fit_rank_one_trace(spectral(), emb, 50, 1e-2, Rng(2));
  EXPECT_TRUE(m.pass);
  EXPECT_LT(m.fitted_matrices.at("N").norm(), 1e-8);
  EXPECT_FALSE(fit_rank_one_trace(spectral(), embed_gl(SymplecticSpace(2), rng), 50, 1e-2, Rng(2)).applicable);
}

TEST(Isotropic, PairsAreIsotropicAndChecksBehave) {
  const SymplecticSpace sp(2);
  Rng rng(19);
  for (int k = 0; k < 20; ++k) {
    const auto [a, b] = isotropic_pair(sp, rng);
    EXPECT_LT(std::abs(sp.omega(a, b)), 1e-12 * (1 + a.norm() * b.norm()));
  }
  const Vec w = random_vector(4, rng);
  EXPECT_TRUE(check_isotropic_linearity([&](const Vec& x) { return w.dot(x); }, sp, 20, 1e-10, Rng(1)).pass);
  const FGEvaluator fg(spectral(), sp);
  EXPECT_TRUE(check_isotropic_linearity(fg.g_partial(random_vector(4, rng)), sp, 20, 1e-8, Rng(2)).pass);
  EXPECT_FALSE(check_isotropic_linearity([](const Vec& x) { return x.norm(); }, sp, 20, 1e-8, Rng(3)).pass);
  EXPECT_FALSE(check_isotropic_linearity([](const Vec& x) { return x.norm(); }, SymplecticSpace(1), 5, 1, Rng(3))
                   .applicable);
}

TEST(MainTheorem, LinearMaslovAndComposite) {
  const SymplecticSpace sp(3);
  Rng rng(23);
  const SpElement n0 = random_sp_element(sp, 1.0, rng);
  const auto lin = fit_main_theorem(linear_qs(n0.mat()), sp, 1e-8, Rng(1));
  EXPECT_TRUE(lin.pass);
  EXPECT_NEAR(lin.fitted.at("maslov_coefficient"), 0.0, 1e-8);
  const auto m = fit_main_theorem(spectral(), sp, 1e-6, Rng(2));
  EXPECT_TRUE(m.pass);
  EXPECT_NEAR(m.fitted.at("omega_abs_coefficient"), -1.0, 1e-8);
  EXPECT_LT(m.fitted_matrices.at("C").norm(), 1e-8);
  MainFitOptions opt;
  opt.expected_coefficient = 2.0;
  const auto c = fit_main_theorem(combine({{2.0, spectral()}, {1.0, linear_qs(n0.mat())}}), sp, 1e-6, Rng(3), opt);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.fitted.at("maslov_coefficient"), 2.0, 1e-6);
}

TEST(MainTheorem, SmallDimensionWarns) {
  const auto r = fit_main_theorem(spectral(), SymplecticSpace(2), 1e-6, Rng(4));
  EXPECT_TRUE(r.applicable);
  ASSERT_FALSE(r.notes.empty());
}
