#include "holq/error.hpp"
#include "holq/tensor.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace holq;
using holq::testing::Rng;
using holq::testing::brute_unfold;

namespace {

Tensor iota(const Shape& shape) {
  std::vector<double> data(shape_product(shape));
  std::iota(data.begin(), data.end(), 1.0);
  return Tensor(shape, std::move(data));
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST(Tensor, ConstructionValidatesLength) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), DimensionError);
  Tensor z({2, 3});
  EXPECT_EQ(z.size(), 6u);
  for (double v : z.data()) EXPECT_EQ(v, 0.0);
}

TEST(Tensor, UnfoldMatrixCases) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  const Tensor t = Tensor::from_matrix(m);
  EXPECT_EQ(unfold(t, 0), m);
  EXPECT_EQ(unfold(t, 1), m.transpose());
}

TEST(Tensor, UnfoldMode2Of2x2x2) {
  Matrix expected(2, 4);
  expected << 1, 2, 5, 6, 3, 4, 7, 8;
  const Tensor t = iota({2, 2, 2});
  EXPECT_EQ(unfold(t, 1), expected);
  EXPECT_EQ(brute_unfold(t, 1), expected);
  EXPECT_EQ(fold(expected, 1, t.shape()), t);
}

TEST(Tensor, UnfoldMatchesIndexMapOracle) {
  Rng rng(11);
  for (const Shape& s : {Shape{3, 4, 5}, Shape{2, 3, 2, 4}, Shape{5, 1, 3}}) {
    const Tensor t = holq::testing::random_tensor(s, rng);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(unfold(t, k), brute_unfold(t, k));
  }
}

TEST(Tensor, FoldRowVector) {
  Matrix m(1, 4);
  m << 1, 2, 3, 4;
  const Tensor t = fold(m, 0, {1, 4});
  EXPECT_EQ(std::vector<double>(t.data().begin(), t.data().end()),
            (std::vector<double>{1, 2, 3, 4}));
}

TEST(Tensor, FoldUnfoldRoundTripExhaustiveSmallShapes) {
  Rng rng(12);
  std::size_t checked = 0;
  for (std::size_t order = 1; order <= 4; ++order) {
    Shape shape(order, 1);
    for (;;) {
      const Tensor t = holq::testing::random_tensor(shape, rng);
      for (std::size_t k = 0; k < order; ++k) {
        ASSERT_EQ(fold(unfold(t, k), k, shape), t);
        ++checked;
      }
      std::size_t m = 0;
      while (m < order && ++shape[m] > 5) shape[m++] = 1;
      if (m == order) break;
    }
  }
  EXPECT_GT(checked, 700u);
}

TEST(Tensor, UnfoldErrors) {
  const Tensor t = iota({2, 3});
  EXPECT_THROW(unfold(t, 2), DimensionError);
  EXPECT_THROW(fold(Matrix::Zero(2, 2), 0, {2, 3}), DimensionError);
}

TEST(Tensor, VecIsMode1Unfolding) {
  const Tensor t = iota({2, 3, 2});
  const Matrix u = unfold(t, 0);
  EXPECT_EQ(t.vec(), Eigen::Map<const Vector>(u.data(), u.size()));
}

TEST(Tensor, TuckerIdentityAndMatrixCases) {
  Rng rng(13);
  const Tensor t = holq::testing::random_tensor({3, 4, 2}, rng);
  std::vector<Matrix> none(3);
  EXPECT_EQ(tucker_mult(none, t), t);

  const Matrix x = holq::testing::random_matrix(3, 5, rng);
  const Matrix a = holq::testing::random_matrix(4, 3, rng);
  std::vector<Matrix> mats{a, Matrix()};
  const Tensor r = tucker_mult(mats, Tensor::from_matrix(x));
  EXPECT_LT(rel(unfold(r, 0), a * x), 1e-14);
}

TEST(Tensor, TuckerMatchesEntrywiseOracle) {
  Rng rng(14);
  const Tensor t = holq::testing::random_tensor({2, 3, 2}, rng);
  std::vector<Matrix> mats{holq::testing::random_matrix(2, 2, rng),
                           holq::testing::random_matrix(3, 3, rng),
                           holq::testing::random_matrix(2, 2, rng)};
  const Tensor fast = tucker_mult(mats, t);
  const Tensor slow = holq::testing::brute_tucker(mats, t);
  EXPECT_LT(frob_norm(fast - slow), 1e-12 * frob_norm(slow));

  // rectangular factors too
  std::vector<Matrix> rect{holq::testing::random_matrix(4, 2, rng), Matrix(),
                           holq::testing::random_matrix(1, 2, rng)};
  const Tensor r = tucker_mult(rect, t);
  EXPECT_EQ(r.shape(), (Shape{4, 3, 1}));
  EXPECT_LT(frob_norm(r - holq::testing::brute_tucker(rect, t)), 1e-12 * frob_norm(r));
}

TEST(Tensor, TuckerUnfoldAndVecConsistency) {
  Rng rng(15);
  const Tensor t = holq::testing::random_tensor({3, 4, 5}, rng);
  std::vector<Matrix> mats{holq::testing::random_matrix(3, 3, rng),
                           holq::testing::random_matrix(4, 4, rng),
                           holq::testing::random_matrix(5, 5, rng)};
  const Tensor r = tucker_mult(mats, t);
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<Matrix> others;
    for (std::size_t j = 0; j < 3; ++j)
      if (j != k) others.push_back(mats[j]);
    const Matrix expected = mats[k] * unfold(t, k) * kron_descending(others).transpose();
    EXPECT_LT(rel(unfold(r, k), expected), 1e-12);
  }
  const Vector v = kron_descending(mats) * t.vec();
  EXPECT_LT((r.vec() - v).norm() / v.norm(), 1e-12);
}

TEST(Tensor, TuckerRejectsMismatch) {
  const Tensor t = iota({2, 3});
  std::vector<Matrix> bad{Matrix::Identity(3, 3), Matrix()};
  EXPECT_THROW(tucker_mult(bad, t), DimensionError);
}

TEST(Tensor, ModeSolveInvertsModeProduct) {
  Rng rng(16);
  const Tensor t = holq::testing::random_tensor({3, 4, 2}, rng);
  const Matrix l = holq::testing::random_lower(4, rng);
  const Tensor back = mode_solve_lower(mode_product(t, l, 1), l, 1);
  EXPECT_LT(frob_norm(back - t), 1e-12 * frob_norm(t));
}

TEST(Tensor, KronBasics) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  Matrix expected = Matrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = a;
  expected.bottomRightCorner(2, 2) = a;
  EXPECT_EQ(kron(Matrix::Identity(2, 2), a), expected);
  EXPECT_EQ(kron(Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 5.0))(0, 0), 15.0);
}

TEST(Tensor, KronVecIdentityAndMixedProduct) {
  Rng rng(17);
  using holq::testing::random_matrix;
  const Matrix a = random_matrix(2, 2, rng), b = random_matrix(2, 2, rng);
  const Matrix c = random_matrix(2, 2, rng), d = random_matrix(2, 2, rng);
  const Matrix x = random_matrix(2, 2, rng);
  const Matrix bxa = b * x * a.transpose();
  const Vector lhs = Eigen::Map<const Vector>(bxa.data(), 4);
  const Vector rhs = kron(a, b) * Eigen::Map<const Vector>(x.data(), 4);
  EXPECT_LT((lhs - rhs).norm(), 1e-13);
  EXPECT_LT((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm(), 1e-12);
}

TEST(Tensor, MergeModesKeepsVecBitwise) {
  Rng rng(18);
  const Tensor m = holq::testing::random_tensor({2, 3}, rng);
  const Tensor v = merge_modes(m, 0, 1);
  EXPECT_EQ(v.shape(), (Shape{6}));
  EXPECT_EQ(v.vec(), m.vec());

  const Tensor t = holq::testing::random_tensor({2, 3, 4}, rng);
  const Tensor merged = merge_modes(t, 1, 2);
  EXPECT_EQ(merged.shape(), (Shape{2, 12}));
  EXPECT_EQ(merged.vec(), t.vec());
  EXPECT_EQ(split_mode(merged, 1, {3, 4}), t);
  EXPECT_THROW(merge_modes(t, 0, 2), DimensionError);
}

TEST(Tensor, MergedCovarianceMatchesSeparableOne) {
  Rng rng(19);
  const Matrix s1 = holq::testing::random_spd(2, rng);
  const Matrix s2 = holq::testing::random_spd(2, rng);
  // Covariance of entries (i1, i2, i3) and (j1, j2, j3) under the separable
  // model, laid out by the merged index i1 + 2 i2 of the 4x3 reshape.
  Matrix separable = Matrix::Zero(12, 12);
  for (int i3 = 0; i3 < 3; ++i3)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int i1 = 0; i1 < 2; ++i1)
        for (int j2 = 0; j2 < 2; ++j2)
          for (int j1 = 0; j1 < 2; ++j1)
            separable(i1 + 2 * i2 + 4 * i3, j1 + 2 * j2 + 4 * i3) = s1(i1, j1) * s2(i2, j2);
  const Matrix merged = kron(Matrix::Identity(3, 3), kron(s2, s1));
  EXPECT_LT((separable - merged).norm(), 1e-15);

  // A draw with covariance s2 x s1 on the 2x2 block has the same law whether
  // it is shaped 2x2x3 or 4x3: the merged mode carries s21.
  const Tensor z = holq::testing::random_tensor({2, 2, 3}, rng);
  const Matrix l1 = s1.llt().matrixL(), l2 = s2.llt().matrixL();
  std::vector<Matrix> sep{l1, l2, Matrix()};
  std::vector<Matrix> mer{kron(l2, l1), Matrix()};
  EXPECT_LT((tucker_mult(sep, z).vec() - tucker_mult(mer, merge_modes(z, 0, 1)).vec()).norm(),
            1e-12);
}

TEST(Tensor, PermuteModes) {
  const Tensor t = iota({2, 3, 4});
  const std::vector<std::size_t> perm{2, 0, 1};
  const Tensor p = permute_modes(t, perm);
  EXPECT_EQ(p.shape(), (Shape{4, 2, 3}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t a[] = {i, j, k};
        const std::size_t b[] = {k, i, j};
        EXPECT_EQ(t.at(a), p.at(b));
      }
  EXPECT_THROW(permute_modes(t, std::vector<std::size_t>{0, 0, 1}), DimensionError);
}

TEST(Tensor, FrobNorm) {
  EXPECT_EQ(frob_norm(Tensor({3, 2})), 0.0);
  EXPECT_DOUBLE_EQ(frob_norm(Tensor::from_matrix(Matrix::Identity(5, 5))), std::sqrt(5.0));
  Rng rng(20);
  const Tensor t = holq::testing::random_tensor({3, 4, 2}, rng);
  double sum = 0.0;
  for (double v : t.data()) sum += v * v;
  EXPECT_NEAR(frob_norm(t), std::sqrt(sum), 1e-13);
}
