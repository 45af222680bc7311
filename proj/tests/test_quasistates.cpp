#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "lqs/lqs.hpp"

using namespace lqs;

TEST(LinearQS, TraceAgainstN) {
  Mat n = Mat::Identity(2, 2);
  n(0, 1) = 2.0;
  Mat a(2, 2);
  a << 1, 3, 5, -1;
  const auto q = linear_qs(n);
  EXPECT_DOUBLE_EQ(q(SpElement::from_matrix(a)), (n * a).trace());
  EXPECT_EQ(q.provenance(), Provenance::linear);
  EXPECT_THROW(q(SpElement::zero(2)), Error);
}

TEST(MaslovQS, AutoFallsBackToLimitOnJordanBlocks) {
  const auto q = maslov_qs({}, MaslovMethod::auto_select);
  const auto nil = nilpotent_jordan_sp(SymplecticSpace(1));
  const auto e = q.evaluate(nil);
  EXPECT_NEAR(e.value, 0.0, 1e-2);
  const auto spec = maslov_qs({}, MaslovMethod::spectral);
  EXPECT_THROW(spec(nil), Error);
}

TEST(Combine, LinearCombinationOfValuesAndBars) {
  const auto q = combine({{2.0, maslov_qs({}, MaslovMethod::spectral)}, {-1.0, linear_qs(Mat::Identity(2, 2))}});
  Mat r(2, 2);
  r << 0, -1, 1, 0;
  const auto e = q.evaluate(SpElement::from_matrix(r));
  EXPECT_NEAR(e.value, 2.0, 1e-10);
  EXPECT_GT(e.error_bar, 0.0);
  EXPECT_TRUE(q.continuous());
}

TEST(Dim2Homogeneous, OddFunctionAcceptedEvenRejected) {
  // f(u) = u_01^3 is odd; the family is positively homogeneous of degree one
  const auto q = dim2_homogeneous_qs([](const SpElement& u) { return std::pow(u.mat()(0, 1), 3); });
  Mat a(2, 2);
  a << 0.5, 2.0, 1.0, -0.5;
  const auto x = SpElement::from_matrix(a);
  EXPECT_NEAR(q(3.0 * x), 3.0 * q(x), 1e-12);
  EXPECT_NEAR(q(-1.0 * x), -q(x), 1e-12);
  EXPECT_THROW(dim2_homogeneous_qs([](const SpElement& u) { return u.norm(); }), Error);
  EXPECT_THROW(q(SpElement::zero(2)), Error);
}

TEST(NilpotentJordan, SingleBlock) {
  for (int n = 1; n <= 4; ++n) {
    const auto a = nilpotent_jordan_sp(SymplecticSpace(n));
    Mat p = Mat::Identity(2 * n, 2 * n);
    for (int k = 1; k < 2 * n; ++k) p = p * a.mat();
    EXPECT_GT(max_abs(p), 0.5);
    EXPECT_LT(max_abs(p * a.mat()), 1e-15);
  }
}

TEST(DiscontinuousQS, ValueOnGeneratorAndOffFamily) {
  for (int n = 1; n <= 3; ++n) {
    const SymplecticSpace sp(n);
    const auto a = nilpotent_jordan_sp(sp);
    const DiscontinuousQS d(a, 2.5);
    EXPECT_NEAR(d(a), 2.5, 1e-12);
    EXPECT_NEAR(d(3.0 * a), 7.5, 1e-12);
    const auto off = random_sp_element(sp, 1.0, 4);
    EXPECT_EQ(d(off), 0.0);
    EXPECT_EQ(d(a + 1e-3 * off), 0.0);  // discontinuity at A
    EXPECT_GT(d.bound(), 0.0);
  }
}

TEST(DiscontinuousQS, RejectsNonRegularNilpotent) {
  Mat z = Mat::Zero(4, 4);
  z(0, 2) = 1.0;  // nilpotent but A^3 = 0
  EXPECT_THROW(DiscontinuousQS(SpElement::from_matrix(z), 1.0), Error);
  Mat r(2, 2);
  r << 0, -1, 1, 0;
  EXPECT_THROW(DiscontinuousQS(SpElement::from_matrix(r), 1.0), Error);
}

TEST(NormFunctional, IsFlaggedAsControl) {
  const auto q = norm_functional();
  EXPECT_EQ(q.provenance(), Provenance::control);
  EXPECT_DOUBLE_EQ(q(SpElement::zero(1)), 0.0);
}
