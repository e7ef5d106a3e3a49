#include "oracles.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace holq::testing {

Tensor random_tensor(const Shape& shape, Rng& rng) {
  std::normal_distribution<double> z;
  Tensor t(shape);
  for (auto& v : t.mutable_data()) v = z(rng);
  return t;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = z(rng);
  return m;
}

Matrix random_lower(Eigen::Index p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::normal_distribution<double> z(0.0, 0.5);
  Matrix l = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    l(j, j) = u(rng);
    for (Eigen::Index i = j + 1; i < p; ++i) l(i, j) = z(rng);
  }
  return l;
}

Matrix random_spd(Eigen::Index p, Rng& rng) {
  const Matrix a = random_matrix(p, p, rng);
  Matrix s = a * a.transpose() + static_cast<double>(p) * Matrix::Identity(p, p);
  return s / std::pow(s.determinant(), 1.0 / static_cast<double>(p));
}

namespace {

std::vector<std::size_t> multi_index(std::size_t linear, const Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t m = 0; m < shape.size(); ++m) {
    idx[m] = linear % shape[m];
    linear /= shape[m];
  }
  return idx;
}

std::size_t linear_of(const std::vector<std::size_t>& idx, const Shape& shape) {
  std::size_t linear = 0;
  for (std::size_t m = shape.size(); m-- > 0;) linear = linear * shape[m] + idx[m];
  return linear;
}

}  // namespace

Matrix brute_unfold(const Tensor& t, std::size_t mode) {
  const Shape& shape = t.shape();
  const auto rows = static_cast<Eigen::Index>(shape[mode]);
  const auto cols = static_cast<Eigen::Index>(t.size() / shape[mode]);
  Matrix out(rows, cols);
  for (std::size_t linear = 0; linear < t.size(); ++linear) {
    const auto idx = multi_index(linear, shape);
    std::size_t col = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < shape.size(); ++m) {
      if (m == mode) continue;
      col += idx[m] * stride;
      stride *= shape[m];
    }
    out(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(col)) = t.data()[linear];
  }
  return out;
}

Tensor brute_tucker(const std::vector<Matrix>& mats, const Tensor& t) {
  Shape out_shape = t.shape();
  for (std::size_t m = 0; m < mats.size(); ++m)
    if (mats[m].size() != 0) out_shape[m] = static_cast<std::size_t>(mats[m].rows());
  Tensor out(out_shape);
  auto o = out.mutable_data();
  for (std::size_t a = 0; a < out.size(); ++a) {
    const auto oi = multi_index(a, out_shape);
    double sum = 0.0;
    for (std::size_t b = 0; b < t.size(); ++b) {
      const auto ii = multi_index(b, t.shape());
      double w = t.data()[b];
      for (std::size_t m = 0; m < t.order() && w != 0.0; ++m) {
        if (m < mats.size() && mats[m].size() != 0)
          w *= mats[m](static_cast<Eigen::Index>(oi[m]), static_cast<Eigen::Index>(ii[m]));
        else if (oi[m] != ii[m])
          w = 0.0;
      }
      sum += w;
    }
    o[linear_of(oi, out_shape)] = sum;
  }
  return out;
}

namespace {

Matrix dense_kron_descending(const std::vector<Matrix>& mats) {
  Matrix out = Matrix::Ones(1, 1);
  for (const auto& m : mats) {
    Matrix next(m.rows() * out.rows(), m.cols() * out.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        next.block(i * out.rows(), j * out.cols(), out.rows(), out.cols()) = m(i, j) * out;
    out = std::move(next);
  }
  return out;
}

std::vector<Matrix> materialized(const std::vector<Matrix>& mats, const Shape& shape) {
  std::vector<Matrix> out;
  for (std::size_t m = 0; m < shape.size(); ++m) {
    const auto p = static_cast<Eigen::Index>(shape[m]);
    out.push_back(m < mats.size() && mats[m].size() != 0 ? mats[m] : Matrix::Identity(p, p));
  }
  return out;
}

}  // namespace

double explicit_criterion(const Tensor& t, const std::vector<Matrix>& factors) {
  std::vector<Matrix> inverses;
  for (const auto& f : materialized(factors, t.shape())) inverses.push_back(f.inverse());
  const Vector v = Eigen::Map<const Vector>(t.data().data(), static_cast<Eigen::Index>(t.size()));
  return (dense_kron_descending(inverses) * v).norm();
}

double dense_loglik(const Tensor& t, double sigma2, const std::vector<Matrix>& sigmas) {
  const Matrix cov = sigma2 * dense_kron_descending(materialized(sigmas, t.shape()));
  Eigen::LLT<Matrix> llt(cov);
  const Vector v = Eigen::Map<const Vector>(t.data().data(), static_cast<Eigen::Index>(t.size()));
  const Vector w = llt.matrixL().solve(v);
  const Matrix l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double n = static_cast<double>(t.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * w.squaredNorm();
}

namespace {

Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

Matrix numeric_hessian(const std::function<double(const Vector&)>& f, const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix h(n, n);
  const double step = 1e-4;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Vector pp = x, pm = x, mp = x, mm = x;
      pp(i) += step; pp(j) += step;
      pm(i) += step; pm(j) -= step;
      mp(i) -= step; mp(j) += step;
      mm(i) -= step; mm(j) -= step;
      h(i, j) = h(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * step * step);
    }
  }
  return h;
}

}  // namespace

MinimizeResult minimize(const std::function<double(const Vector&)>& f, Vector x0,
                        std::size_t max_iter, bool newton_polish) {
  const Eigen::Index n = x0.size();
  Vector x = std::move(x0);
  double fx = f(x);
  Vector g = numeric_gradient(f, x);
  Matrix hinv = Matrix::Identity(n, n);
  std::size_t it = 0;
  for (; it < max_iter && g.norm() > 1e-10; ++it) {
    Vector dir = -hinv * g;
    if (dir.dot(g) >= 0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    double f_new = f(x + step * dir);
    while (!(f_new <= fx + 1e-4 * step * dir.dot(g)) && step > 1e-16) {
      step *= 0.5;
      f_new = f(x + step * dir);
    }
    if (step <= 1e-16) break;
    const Vector s = step * dir;
    x += s;
    const Vector g_new = numeric_gradient(f, x);
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(n, n);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    fx = f_new;
    g = g_new;
  }
  if (newton_polish) {
    for (int k = 0; k < 5; ++k) {
      const Matrix h = numeric_hessian(f, x);
      Eigen::LLT<Matrix> llt(h);
      if (llt.info() != Eigen::Success) break;
      const Vector cand = x - llt.solve(g);
      const double f_cand = f(cand);
      if (!(f_cand <= fx)) break;
      x = cand;
      fx = f_cand;
      g = numeric_gradient(f, x);
    }
  }
  return {x, fx, it, g.norm()};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double p = 0.0;
  if (lambda < 1e-3) {
    p = 1.0;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      p += term;
      if (std::abs(term) < 1e-12) break;
      sign = -sign;
    }
    p = std::clamp(2.0 * p, 0.0, 1.0);
  }
  return {d, p};
}

double worst_increase(const std::vector<double>& history) {
  double worst = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i)
    worst = std::max(worst, (history[i] - history[i - 1]) / history[i - 1]);
  return worst;
}

}  // namespace holq::testing
