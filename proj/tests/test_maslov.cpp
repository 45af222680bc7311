#include <cmath>

#include <gtest/gtest.h>

#include "lqs/lqs.hpp"
#include "test_support.hpp"

using namespace lqs;

namespace {
SpElement m2(double a00, double a01, double a10, double a11) {
  Mat m(2, 2);
  m << a00, a01, a10, a11;
  return SpElement::from_matrix(m);
}
}  // namespace

TEST(MaslovDim2, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(maslov_dim2(m2(0, -1, 1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(maslov_dim2(m2(0, 1, -1, 0)), -1.0);
  EXPECT_DOUBLE_EQ(maslov_dim2(m2(1, 0, 0, -1)), 0.0);   // hyperbolic
  EXPECT_DOUBLE_EQ(maslov_dim2(m2(0, 1, 0, 0)), 0.0);    // parabolic
  EXPECT_DOUBLE_EQ(maslov_dim2(m2(0, 0, 0, 0)), 0.0);
  // a = 1, b = -4, c = 1: a^2 + bc = -3, b < 0
  EXPECT_NEAR(maslov_dim2(m2(1, -4, 1, -1)), std::sqrt(3.0), 1e-15);
  EXPECT_THROW(maslov_dim2(SpElement::zero(2)), Error);
}

TEST(MaslovLimit, RotationConvergesToOne) {
  const auto est = maslov_limit(m2(0, -1, 1, 0));
  EXPECT_NEAR(est.value, 1.0, 1e-9);
  EXPECT_TRUE(est.within_tol);
}

TEST(MaslovLimit, HyperbolicStaysBoundedAndGivesZero) {
  const auto est = maslov_limit(m2(1, 0, 0, -1));
  EXPECT_NEAR(est.value, 0.0, 1e-12);
  // strongly hyperbolic plus rotation in another plane: no overflow at t = 2000
  Mat b = Mat::Zero(4, 4);
  b(0, 0) = -3.0;
  b(2, 2) = 3.0;
  b(1, 3) = 0.5;
  b(3, 1) = -0.5;
  const auto e2 = maslov_limit(SpElement::from_matrix(b));
  EXPECT_NEAR(e2.value, -0.5, 1e-2);
}

TEST(MaslovLimit, EllipticReferenceValue) {
  // B = Omega^{-1} S with S positive-definite; reference from an independent
  // full polar-factor phase integration, refined by the eigenvalue sum
  Mat b(4, 4);
  b << -0.1, 0.0, -1.5, -0.4, 0.0, -0.2, -0.4, -3.0, 2.0, 0.3, 0.1, 0.0, 0.3, 1.0, 0.0, 0.2;
  const SpElement x = SpElement::from_matrix(b);
  const double reference = 3.448823607953974;
  EXPECT_NEAR(maslov_spectral(x), reference, 1e-9);
  const auto est = maslov_limit(x);
  EXPECT_NEAR(est.value, reference, est.error_bar + 1e-2);
}

TEST(MaslovLimit, AgreesWithDim2OnRandomSamples) {
  Rng rng(2024);
  for (int k = 0; k < 20; ++k) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(-2, 2);
    const auto x = m2(a, b, c, -a);
    const auto est = maslov_limit(x);
    EXPECT_NEAR(est.value, maslov_dim2(x), est.error_bar + 1e-3) << a << " " << b << " " << c;
  }
}

TEST(MaslovLimit, YAndZAnchorValues) {
  Rng rng(7);
  for (int n = 1; n <= 3; ++n) {
    const SymplecticSpace sp(n);
    for (int k = 0; k < 3; ++k) {
      const Vec xi = random_vector(sp.dim(), rng), eta = random_vector(sp.dim(), rng);
      const auto y = maslov_limit(realize(y_desc(xi, eta)));
      const auto z = maslov_limit(realize(z_desc(xi, eta)));
      EXPECT_NEAR(y.value, -std::abs(sp.omega(xi, eta)), y.error_bar + 1e-2);
      EXPECT_NEAR(z.value, 0.0, z.error_bar + 1e-2);
      EXPECT_DOUBLE_EQ(maslov_on_descriptor(y_desc(xi, eta)), -std::abs(sp.omega(xi, eta)));
    }
  }
}

TEST(MaslovSpectral, KnownBlocksAndHomogeneity) {
  Rng rng(55);
  for (int n = 1; n <= 4; ++n) {
    const auto ke = test_support::known_semisimple(n, rng);
    const double v = maslov_spectral(ke.b);
    EXPECT_NEAR(v, ke.maslov, 1e-8);
    for (double s : {2.0, 3.0, -1.0}) EXPECT_NEAR(maslov_spectral(s * ke.b), s * v, 1e-7);
  }
}

TEST(MaslovSpectral, RefusesNonSemisimple) {
  try {
    maslov_spectral(m2(0, 1, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_semisimple);
  }
}

TEST(MaslovLimit, TraceFinalRowMatchesValue) {
  MaslovLimitConfig cfg;
  cfg.t_max = 50.0;
  const auto x = m2(0.2, -1.3, 0.9, -0.2);
  const auto tr = trace_phase(x.mat(), cfg);
  const auto est = maslov_limit(x, cfg);
  EXPECT_EQ(tr.t.back(), 50.0);
  EXPECT_EQ(tr.theta.back() / tr.t.back(), est.value);
  for (std::size_t i = 1; i < tr.t.size(); ++i) ASSERT_GT(tr.t[i], tr.t[i - 1]);
}

TEST(MaslovLimit, ConfigValidation) {
  MaslovLimitConfig cfg;
  cfg.dt = -1;
  EXPECT_THROW(maslov_limit(m2(0, 1, -1, 0), cfg), Error);
}

TEST(MaslovUnitary, ImaginaryTraceMatchesSpectral) {
  const SymplecticSpace sp(3);
  const auto j = standard_complex_structure(sp);
  const auto basis = unitary_subalgebra_basis(j);
  ASSERT_EQ(basis.size(), 9u);
  Rng rng(12);
  for (int k = 0; k < 10; ++k) {
    Mat a = Mat::Zero(6, 6);
    for (const auto& b : basis) a += rng.normal() * b;
    const auto x = SpElement::project(a);
    EXPECT_NEAR(maslov_unitary_trace(x), maslov_spectral(x), 1e-9);
  }
}
