#include <cmath>

#include <gtest/gtest.h>

#include "lqs/lqs.hpp"
#include "test_support.hpp"

using namespace lqs;

TEST(Classification, SpectralKinds) {
  Mat b = Mat::Zero(4, 4);
  // real pair +-1 on plane 0, imaginary pair +-2i on plane 1
  b(0, 0) = -1.0;
  b(2, 2) = 1.0;
  b(1, 3) = 2.0;
  b(3, 1) = -2.0;
  const auto rep = classify_eigenstructure(SpElement::from_matrix(b));
  ASSERT_TRUE(rep.semisimple);
  int real = 0, imag = 0;
  for (const auto& c : rep.clusters) {
    if (c.kind == SpectralKind::real_pair) {
      ++real;
      EXPECT_NEAR(std::abs(c.a), 1.0, 1e-12);
    }
    if (c.kind == SpectralKind::imaginary_pair) {
      ++imag;
      EXPECT_NEAR(std::abs(c.b), 2.0, 1e-12);
    }
  }
  EXPECT_EQ(real, 1);
  EXPECT_EQ(imag, 1);
}

TEST(Classification, JordanBlockIsNotSemisimple) {
  const auto a = nilpotent_jordan_sp(SymplecticSpace(2));
  EXPECT_FALSE(classify_eigenstructure(a).semisimple);
  EXPECT_THROW(williamson_decompose(a), Error);
}

TEST(Williamson, RoundTripOnKnownBlocks) {
  Rng rng(77);
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k < 10; ++k) {
      const auto ke = test_support::known_semisimple(n, rng);
      const auto w = williamson_decompose(ke.b);
      EXPECT_LT(w.reconstruction_residual, 1e-8);
      EXPECT_LT(w.symplectic_defect, 1e-8);
      EXPECT_LT((w.reconstruct() - ke.b.mat()).norm(), 1e-6 * ke.b.norm());
      ASSERT_EQ(w.blocks.size(), ke.blocks.size());
    }
}

TEST(Williamson, ZeroMatrix) {
  const auto w = williamson_decompose(SpElement::zero(2));
  EXPECT_EQ(w.reconstruction_residual, 0.0);
  EXPECT_LT(w.symplectic_defect, 1e-14);
  for (const auto& b : w.blocks) EXPECT_EQ(b.a, 0.0);
}

TEST(Williamson, TwoDimensionalNormalForms) {
  Mat r(2, 2);
  r << 0, -1, 1, 0;
  const auto w = williamson_decompose(SpElement::from_matrix(r));
  ASSERT_EQ(w.blocks.size(), 1u);
  EXPECT_EQ(w.blocks[0].type, BlockType::imaginary_pair);
  EXPECT_NEAR(w.blocks[0].b, -1.0, 1e-14);
}

TEST(YZDecomposition, QuadrupleGroupRelations) {
  const SymplecticSpace sp(2);
  const double a = 0.7, b = 1.3;
  const auto terms = quadruple_terms(a, b, sp.e(0), sp.e(1), sp.f(0), sp.f(1));
  const WilliamsonBlock blk{BlockType::quadruple, a, b, {0, 1}};
  EXPECT_LT(max_abs(realize_terms(terms, 2) - assemble_blocks(2, {blk})), 1e-14);
  const Mat z1 = realize_matrix(terms[0].descriptor), z2 = realize_matrix(terms[1].descriptor);
  const Mat y1 = realize_matrix(terms[2].descriptor), y2 = realize_matrix(terms[3].descriptor);
  EXPECT_LT(max_abs(commutator(a * z1 + a * z2, -b * y1 + b * y2)), 1e-14);
  EXPECT_LT(max_abs(commutator(z1, z2)), 1e-14);
  EXPECT_LT(max_abs(commutator(y1, y2)), 1e-14);
}

TEST(YZDecomposition, ReproducesElementAndMaslovValue) {
  Rng rng(91);
  for (int n = 1; n <= 4; ++n) {
    const auto ke = test_support::known_semisimple(n, rng);
    const auto terms = yz_decomposition(ke.b);
    EXPECT_LT((realize_terms(terms, n) - ke.b.mat()).norm(), 1e-8 * (1 + ke.b.norm()));
    double v = 0.0;
    for (const auto& t : terms) v += t.coefficient * maslov_on_descriptor(t.descriptor);
    EXPECT_NEAR(v, ke.maslov, 1e-8);
  }
}
