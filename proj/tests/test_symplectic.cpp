#include <gtest/gtest.h>

#include "lqs/lqs.hpp"

using namespace lqs;

TEST(SymplecticSpace, OmegaOnBasisVectors) {
  const SymplecticSpace sp(2);
  EXPECT_DOUBLE_EQ(sp.omega(sp.e(0), sp.f(0)), 1.0);
  EXPECT_DOUBLE_EQ(sp.omega(sp.f(0), sp.e(0)), -1.0);
  EXPECT_DOUBLE_EQ(sp.omega(sp.e(0), sp.e(1)), 0.0);
  EXPECT_DOUBLE_EQ(sp.omega(sp.e(0) + sp.f(1), sp.f(0) - sp.e(1)), 2.0);
}

TEST(SymplecticSpace, OmegaRejectsWrongDimension) {
  const SymplecticSpace sp(2);
  try {
    sp.omega(Vec::Zero(3), Vec::Zero(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(SymplecticSpace, OmegaAdjointOfOmegaIsMinusOmega) {
  const SymplecticSpace sp(3);
  const Mat om = sp.omega_matrix();
  EXPECT_LT(max_abs(omega_adjoint(om) + om), 1e-15);
  // Omega itself lies in sp: A^omega = -A
  EXPECT_TRUE(is_skew_symplectic(om));
}

TEST(SymplecticSpace, OmegaAdjointIsAnInvolutionAndReversesProducts) {
  Rng rng(11);
  Mat a(4, 4), b(4, 4);
  for (Eigen::Index i = 0; i < 16; ++i) {
    a.data()[i] = rng.normal();
    b.data()[i] = rng.normal();
  }
  EXPECT_LT(max_abs(omega_adjoint(omega_adjoint(a)) - a), 1e-14);
  EXPECT_LT(max_abs(omega_adjoint(a * b) - omega_adjoint(b) * omega_adjoint(a)), 1e-12);
}

TEST(SpElement, BlockFormAndRejection) {
  Mat a(2, 2);
  a << 0.3, 2.0, -1.0, -0.3;
  EXPECT_NO_THROW(SpElement::from_matrix(a));
  a(1, 1) = 0.5;
  try {
    SpElement::from_matrix(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_in_algebra);
  }
  Mat odd = Mat::Zero(3, 3);
  EXPECT_THROW(SpElement::from_matrix(odd), Error);
}

TEST(SpElement, BracketStaysInAlgebra) {
  const SymplecticSpace sp(3);
  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_sp_element(sp, 1.0, rng), b = random_sp_element(sp, 1.0, rng);
    EXPECT_TRUE(is_skew_symplectic(bracket(a, b), 1e-12));
  }
}

TEST(RankOne, TwoDimensionalGenerators) {
  const SymplecticSpace sp(1);
  Mat z(2, 2), y(2, 2);
  z << -1, 0, 0, 1;
  y << 0, 1, -1, 0;
  EXPECT_LT(max_abs(z_operator(sp.e(0), sp.f(0)) - z), 1e-15);
  EXPECT_LT(max_abs(y_operator(sp.e(0), sp.f(0)) - y), 1e-15);
}

TEST(RankOne, TOperatorDefinition) {
  const SymplecticSpace sp(2);
  Rng rng(5);
  const Vec xi = random_vector(4, rng), eta = random_vector(4, rng), x = random_vector(4, rng);
  // T_{xi,eta} x = omega(xi, x) eta
  EXPECT_NEAR((t_operator(xi, eta) * x - sp.omega(xi, x) * eta).norm(), 0.0, 1e-13);
  EXPECT_TRUE(is_skew_symplectic(t_operator(xi, xi)));
  EXPECT_FALSE(is_skew_symplectic(t_operator(xi, eta)));
  EXPECT_THROW(realize({RankOneKind::T, xi, eta}), Error);
  EXPECT_NO_THROW(realize(y_desc(xi, eta)));
  EXPECT_NO_THROW(realize(z_desc(xi, eta)));
}

TEST(ComplexStructure, StandardIsCompatibleAndBadOnesAreRejected) {
  const SymplecticSpace sp(2);
  const auto j = standard_complex_structure(sp);
  EXPECT_LT(max_abs(j.inner_product_matrix() - Mat::Identity(4, 4)), 1e-15);
  EXPECT_THROW(CompatibleComplexStructure(-standard_j(2)), Error);  // omega(., J.) negative
  EXPECT_THROW(CompatibleComplexStructure(Mat::Identity(4, 4)), Error);
  // conjugates of J0 by symplectic matrices stay compatible
  const Mat g = random_symplectic_group_element(sp, 0.5, 9);
  EXPECT_NO_THROW(CompatibleComplexStructure(g * standard_j(2) * symplectic_inverse(g), 1e-9));
}

TEST(RandomElements, GroupElementsAreSymplectic) {
  for (int n = 1; n <= 4; ++n) {
    const SymplecticSpace sp(n);
    const Mat g = random_symplectic_group_element(sp, 0.5, 100 + n);
    EXPECT_LT(symplectic_group_defect(g), 1e-12);
    EXPECT_LT(max_abs(symplectic_inverse(g) * g - Mat::Identity(2 * n, 2 * n)), 1e-12);
  }
}

TEST(CommutingPairs, CertificatesHold) {
  for (int n = 1; n <= 3; ++n) {
    const SymplecticSpace sp(n);
    Rng rng(40 + n);
    for (auto s : {PairStrategy::common_frame, PairStrategy::odd_polynomial})
      for (int k = 0; k < 20; ++k) {
        const auto p = commuting_pair(sp, s, rng);
        EXPECT_LT(p.commutator_defect, 1e-9);
      }
  }
}

TEST(Rng, DeterministicAndSplitIndependent) {
  Rng a(42), b(42);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  const Rng root(42);
  Rng s0 = root.split(0), s0b = root.split(0), s1 = root.split(1);
  const auto x = s0.next_u64();
  EXPECT_EQ(x, s0b.next_u64());
  EXPECT_NE(x, s1.next_u64());
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}
