#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace holq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape = std::vector<std::size_t>;

/// Dense multiway array of doubles.
///
/// Storage is contiguous in vectorization order: the first mode varies
/// fastest, i.e. element (i_1, ..., i_K) lives at
/// i_1 + p_1 * (i_2 + p_2 * (i_3 + ...)). Modes are numbered from 0.
class Tensor {
 public:
  Tensor() = default;
  /// Zero-filled tensor.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  /// A p x n matrix viewed as an order-2 tensor.
  static Tensor from_matrix(const Matrix& m);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t order() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t mode) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> mutable_data() noexcept { return data_; }

  double operator[](std::size_t linear) const { return data_[linear]; }
  double& operator[](std::size_t linear) { return data_[linear]; }

  double at(std::span<const std::size_t> index) const;
  std::size_t linear_index(std::span<const std::size_t> index) const;

  /// Column vector view of the storage (a copy).
  Vector vec() const;

  Tensor& operator*=(double s);
  Tensor& operator/=(double s);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

Tensor operator*(double s, Tensor t);
Tensor operator*(Tensor t, double s);
Tensor operator/(Tensor t, double s);
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);

std::size_t shape_product(std::span<const std::size_t> shape);

/// Mode-k unfolding: a p_k x (size / p_k) matrix whose columns run over the
/// remaining modes in ascending order, lowest remaining mode fastest.
Matrix unfold(const Tensor& t, std::size_t mode);

/// Inverse of unfold.
Tensor fold(const Matrix& m, std::size_t mode, const Shape& shape);

/// Multiplies mode k by `a` (a.cols() must equal p_k). The result has
/// a.rows() entries along mode k.
Tensor mode_product(const Tensor& t, const Matrix& a, std::size_t mode);

/// Applies the inverse of the lower triangular matrix `l` along mode k
/// without forming the inverse.
Tensor mode_solve_lower(const Tensor& t, const Matrix& l, std::size_t mode);

/// Gram matrix of the mode-k unfolding, unfold(t,k) * unfold(t,k)^T.
Matrix mode_gram(const Tensor& t, std::size_t mode);

/// Multilinear (Tucker) product (A_1, ..., A_K) . t.
///
/// `mats` may be shorter than the order of `t`; missing trailing modes and
/// empty (0 x 0) matrices stand for the identity.
Tensor tucker_mult(std::span<const Matrix> mats, const Tensor& t);

/// Tucker product with the inverses of lower triangular factors, computed
/// by triangular solves. Empty matrices stand for the identity.
Tensor tucker_solve_lower(std::span<const Matrix> factors, const Tensor& t);

Matrix kron(const Matrix& a, const Matrix& b);

/// kron(mats[last], ..., mats[0]), the Kronecker order that matches the
/// first-mode-fastest vectorization.
Matrix kron_descending(std::span<const Matrix> mats);

/// Reorders modes: mode i of the result is mode perm[i] of t.
Tensor permute_modes(const Tensor& t, std::span<const std::size_t> perm);

/// Merges modes j and j+1 into one mode of size p_j * p_{j+1} with mode j
/// varying fastest. The storage is untouched.
Tensor merge_modes(const Tensor& t, std::size_t j, std::size_t k);

/// Splits `mode` into consecutive modes of the given sizes (first fastest).
Tensor split_mode(const Tensor& t, std::size_t mode, const Shape& sizes);

double frob_norm(const Tensor& t);

}  // namespace holq
