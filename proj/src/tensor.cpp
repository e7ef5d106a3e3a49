#include "holq/tensor.hpp"

#include "holq/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace holq {

namespace {

using ConstBlock = Eigen::Map<const Matrix>;
using Block = Eigen::Map<Matrix>;

// Sizes of the modes before and after `mode`, for the slice view used by the
// mode-wise kernels: the tensor is `right` consecutive left x p_k blocks.
struct Slicing {
  std::size_t left = 1;
  std::size_t p = 1;
  std::size_t right = 1;
};

Slicing slicing(const Shape& shape, std::size_t mode) {
  Slicing s;
  for (std::size_t i = 0; i < mode; ++i) s.left *= shape[i];
  s.p = shape[mode];
  for (std::size_t i = mode + 1; i < shape.size(); ++i) s.right *= shape[i];
  return s;
}

void check_mode(const Tensor& t, std::size_t mode) {
  if (mode >= t.order()) {
    throw DimensionError("mode index " + std::to_string(mode) + " out of range for order-" +
                         std::to_string(t.order()) + " tensor");
  }
}

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

std::size_t shape_product(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {
  for (auto d : shape_)
    if (d == 0) throw DimensionError("tensor mode sizes must be positive");
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_)
    if (d == 0) throw DimensionError("tensor mode sizes must be positive");
  if (data_.size() != shape_product(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape product " +
                         std::to_string(shape_product(shape_)));
  }
}

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  Block(t.data_.data(), m.rows(), m.cols()) = m;
  return t;
}

std::size_t Tensor::dim(std::size_t mode) const {
  check_mode(*this, mode);
  return shape_[mode];
}

std::size_t Tensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != order()) throw DimensionError("index length does not match tensor order");
  std::size_t linear = 0;
  for (std::size_t m = order(); m-- > 0;) {
    if (index[m] >= shape_[m]) throw DimensionError("index out of range");
    linear = linear * shape_[m] + index[m];
  }
  return linear;
}

double Tensor::at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }

Vector Tensor::vec() const { return Eigen::Map<const Vector>(data_.data(), idx(data_.size())); }

Tensor& Tensor::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Tensor& Tensor::operator/=(double s) {
  for (auto& v : data_) v /= s;
  return *this;
}

Tensor operator*(double s, Tensor t) { return t *= s; }
Tensor operator*(Tensor t, double s) { return t *= s; }
Tensor operator/(Tensor t, double s) { return t /= s; }

Tensor operator+(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw DimensionError("shape mismatch in tensor sum");
  Tensor out = a;
  auto o = out.mutable_data();
  auto d = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += d[i];
  return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw DimensionError("shape mismatch in tensor difference");
  Tensor out = a;
  auto o = out.mutable_data();
  auto d = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= d[i];
  return out;
}

Matrix unfold(const Tensor& t, std::size_t mode) {
  check_mode(t, mode);
  const auto s = slicing(t.shape(), mode);
  const auto data = t.data();
  Matrix m(idx(s.p), idx(s.left * s.right));
  for (std::size_t b = 0; b < s.right; ++b) {
    const double* block = data.data() + b * s.left * s.p;
    for (std::size_t i = 0; i < s.p; ++i)
      for (std::size_t a = 0; a < s.left; ++a)
        m(idx(i), idx(a + s.left * b)) = block[a + s.left * i];
  }
  return m;
}

Tensor fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  Tensor t(shape);
  check_mode(t, mode);
  const auto s = slicing(shape, mode);
  if (m.rows() != idx(s.p) || m.cols() != idx(s.left * s.right)) {
    throw DimensionError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(s.p) + "x" +
                         std::to_string(s.left * s.right));
  }
  auto data = t.mutable_data();
  for (std::size_t b = 0; b < s.right; ++b) {
    double* block = data.data() + b * s.left * s.p;
    for (std::size_t i = 0; i < s.p; ++i)
      for (std::size_t a = 0; a < s.left; ++a)
        block[a + s.left * i] = m(idx(i), idx(a + s.left * b));
  }
  return t;
}

Tensor mode_product(const Tensor& t, const Matrix& a, std::size_t mode) {
  check_mode(t, mode);
  const auto s = slicing(t.shape(), mode);
  if (a.cols() != idx(s.p)) {
    throw DimensionError("mode_product: matrix has " + std::to_string(a.cols()) +
                         " columns but mode " + std::to_string(mode) + " has size " +
                         std::to_string(s.p));
  }
  Shape out_shape = t.shape();
  out_shape[mode] = static_cast<std::size_t>(a.rows());
  Tensor out(out_shape);
  const std::size_t r = out_shape[mode];
  const double* in = t.data().data();
  double* o = out.mutable_data().data();
  if (s.left == 1) {
    Block(o, idx(r), idx(s.right)).noalias() = a * ConstBlock(in, idx(s.p), idx(s.right));
    return out;
  }
  for (std::size_t b = 0; b < s.right; ++b) {
    Block(o + b * s.left * r, idx(s.left), idx(r)).noalias() =
        ConstBlock(in + b * s.left * s.p, idx(s.left), idx(s.p)) * a.transpose();
  }
  return out;
}

Tensor mode_solve_lower(const Tensor& t, const Matrix& l, std::size_t mode) {
  check_mode(t, mode);
  const auto s = slicing(t.shape(), mode);
  if (l.rows() != idx(s.p) || l.cols() != idx(s.p))
    throw DimensionError("mode_solve_lower: factor size does not match mode size");
  Tensor out = t;
  double* o = out.mutable_data().data();
  const auto tri = l.triangularView<Eigen::Lower>();
  if (s.left == 1) {
    Block block(o, idx(s.p), idx(s.right));
    tri.solveInPlace(block);
    return out;
  }
  Matrix tmp(idx(s.p), idx(s.left));
  for (std::size_t b = 0; b < s.right; ++b) {
    Block block(o + b * s.left * s.p, idx(s.left), idx(s.p));
    tmp = block.transpose();
    tri.solveInPlace(tmp);
    block = tmp.transpose();
  }
  return out;
}

Matrix mode_gram(const Tensor& t, std::size_t mode) {
  check_mode(t, mode);
  const auto s = slicing(t.shape(), mode);
  const double* in = t.data().data();
  Matrix g = Matrix::Zero(idx(s.p), idx(s.p));
  if (s.left == 1) {
    ConstBlock m(in, idx(s.p), idx(s.right));
    g.selfadjointView<Eigen::Lower>().rankUpdate(m);
  } else {
    for (std::size_t b = 0; b < s.right; ++b) {
      ConstBlock block(in + b * s.left * s.p, idx(s.left), idx(s.p));
      g.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    }
  }
  return g.selfadjointView<Eigen::Lower>();
}

Tensor tucker_mult(std::span<const Matrix> mats, const Tensor& t) {
  if (mats.size() > t.order()) throw DimensionError("tucker_mult: more matrices than modes");
  Tensor out = t;
  for (std::size_t k = 0; k < mats.size(); ++k) {
    if (mats[k].size() == 0) continue;
    out = mode_product(out, mats[k], k);
  }
  return out;
}

Tensor tucker_solve_lower(std::span<const Matrix> factors, const Tensor& t) {
  if (factors.size() > t.order()) throw DimensionError("tucker_solve_lower: more factors than modes");
  Tensor out = t;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].size() == 0) continue;
    out = mode_solve_lower(out, factors[k], k);
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_descending(std::span<const Matrix> mats) {
  if (mats.empty()) return Matrix::Identity(1, 1);
  Matrix out = mats[0];
  for (std::size_t k = 1; k < mats.size(); ++k) out = kron(mats[k], out);
  return out;
}

Tensor permute_modes(const Tensor& t, std::span<const std::size_t> perm) {
  const std::size_t d = t.order();
  if (perm.size() != d) throw DimensionError("permutation length does not match tensor order");
  std::vector<bool> seen(d, false);
  for (auto p : perm) {
    if (p >= d || seen[p]) throw DimensionError("mode permutation is not a bijection");
    seen[p] = true;
  }
  std::vector<std::size_t> in_stride(d, 1);
  for (std::size_t m = 1; m < d; ++m) in_stride[m] = in_stride[m - 1] * t.shape()[m - 1];

  Shape out_shape(d);
  std::vector<std::size_t> stride(d);
  for (std::size_t i = 0; i < d; ++i) {
    out_shape[i] = t.shape()[perm[i]];
    stride[i] = in_stride[perm[i]];
  }
  Tensor out(out_shape);
  auto o = out.mutable_data();
  const auto in = t.data();
  std::vector<std::size_t> counter(d, 0);
  std::size_t src = 0;
  for (std::size_t linear = 0; linear < o.size(); ++linear) {
    o[linear] = in[src];
    for (std::size_t i = 0; i < d; ++i) {
      if (++counter[i] < out_shape[i]) {
        src += stride[i];
        break;
      }
      src -= (out_shape[i] - 1) * stride[i];
      counter[i] = 0;
    }
  }
  return out;
}

Tensor merge_modes(const Tensor& t, std::size_t j, std::size_t k) {
  if (k >= t.order() || j >= k) throw DimensionError("merge_modes: need j < k < order");
  if (k != j + 1) {
    throw DimensionError("merge_modes: modes " + std::to_string(j) + " and " + std::to_string(k) +
                         " are not adjacent; permute them first");
  }
  Shape shape;
  for (std::size_t m = 0; m < t.order(); ++m) {
    if (m == k) continue;
    shape.push_back(m == j ? t.shape()[j] * t.shape()[k] : t.shape()[m]);
  }
  return Tensor(std::move(shape), std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor split_mode(const Tensor& t, std::size_t mode, const Shape& sizes) {
  check_mode(t, mode);
  if (shape_product(sizes) != t.shape()[mode])
    throw DimensionError("split_mode: sizes do not multiply to the mode size");
  Shape shape(t.shape().begin(), t.shape().begin() + static_cast<std::ptrdiff_t>(mode));
  shape.insert(shape.end(), sizes.begin(), sizes.end());
  shape.insert(shape.end(), t.shape().begin() + static_cast<std::ptrdiff_t>(mode) + 1,
               t.shape().end());
  return Tensor(std::move(shape), std::vector<double>(t.data().begin(), t.data().end()));
}

double frob_norm(const Tensor& t) {
  const auto d = t.data();
  return Eigen::Map<const Vector>(d.data(), idx(d.size())).norm();
}

}  // namespace holq
