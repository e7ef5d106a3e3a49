#include "holq/kernels.hpp"

#include "holq/error.hpp"

#include <cmath>
#include <string>

namespace holq {

namespace {

std::string dims(const Matrix& x) {
  return std::to_string(x.rows()) + "x" + std::to_string(x.cols());
}

void require_wide(const Matrix& x, const char* op) {
  if (x.rows() == 0 || x.rows() > x.cols()) {
    throw RankDeficientError(std::string(op) + ": a " + dims(x) +
                             " matrix cannot have full row rank");
  }
}

}  // namespace

LqFactors lq(const Matrix& x) {
  require_wide(x, "lq");
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();
  Eigen::HouseholderQR<Matrix> qr(x.transpose());
  Matrix l = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>().transpose();
  Matrix q = (qr.householderQ() * Matrix::Identity(n, p)).transpose();

  const double floor = kRankTol * x.norm();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(std::abs(l(i, i)) > floor)) {
      throw RankDeficientError("lq: " + dims(x) + " matrix is rank deficient (pivot " +
                               std::to_string(i) + " below tolerance)");
    }
    if (l(i, i) < 0) {
      l.col(i) *= -1.0;
      q.row(i) *= -1.0;
    }
  }
  return {std::move(l), std::move(q)};
}

RqFactors rq(const Matrix& x) {
  require_wide(x, "rq");
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();
  // X = E (E X) with E the exchange matrix; a QR of (E X)^T turns into an RQ
  // once both sides are flipped back.
  Matrix flipped = x.colwise().reverse();
  Eigen::HouseholderQR<Matrix> qr(flipped.transpose());
  Matrix rt = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>().transpose();
  Matrix r = rt.reverse();
  Matrix z = (qr.householderQ() * Matrix::Identity(n, p)).transpose().colwise().reverse();

  const double floor = kRankTol * x.norm();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(std::abs(r(i, i)) > floor)) {
      throw RankDeficientError("rq: " + dims(x) + " matrix is rank deficient");
    }
    if (r(i, i) < 0) {
      r.col(i) *= -1.0;
      z.row(i) *= -1.0;
    }
  }
  return {std::move(r), std::move(z)};
}

Matrix cholesky(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw DimensionError("cholesky: matrix is " + dims(s) + ", expected square");
  }
  if ((s - s.transpose()).norm() > 1e-10 * s.norm()) {
    throw NotPositiveDefiniteError("cholesky: matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("cholesky: matrix is not positive definite");
  }
  Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0)) throw NotPositiveDefiniteError("cholesky: non-positive pivot");
  }
  return l;
}

SvdFactors svd(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> dec(x, Eigen::ComputeFullU | Eigen::ComputeThinV);
  SvdFactors f{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  for (Eigen::Index j = 0; j < f.u.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < f.u.rows(); ++i) {
      if (std::abs(f.u(i, j)) > best) {
        best = std::abs(f.u(i, j));
        arg = i;
      }
    }
    if (f.u(arg, j) < 0) {
      f.u.col(j) *= -1.0;
      if (j < f.v.cols()) f.v.col(j) *= -1.0;
    }
  }
  return f;
}

PolarFactors polar(const Matrix& x) {
  require_wide(x, "polar");
  auto f = svd(x);
  if (!(f.d.minCoeff() > kRankTol * x.norm())) {
    throw RankDeficientError("polar: " + dims(x) + " matrix is rank deficient");
  }
  Matrix p = f.u * f.d.asDiagonal() * f.u.transpose();
  p = 0.5 * (p + p.transpose());
  return {std::move(p), f.u * f.v.transpose()};
}

double log_det_triangular(const Matrix& l) {
  return l.diagonal().array().abs().log().sum();
}

NormalizedLq normalized_lq(const Matrix& x) {
  auto [l0, q0] = lq(x);
  const double p = static_cast<double>(x.rows());
  const double scale = std::exp(log_det_triangular(l0) / p);
  const double root_p = std::sqrt(p);
  return {scale * root_p, l0 / scale, q0 / root_p};
}

NormalizedPolar normalized_polar(const Matrix& x) {
  auto [p0, w0] = polar(x);
  const double trace = p0.trace();
  const double root_p = std::sqrt(static_cast<double>(x.rows()));
  return {trace * root_p, p0 / trace, w0 / root_p};
}

Matrix diag_minimizer(const Matrix& x) {
  if (x.rows() == 0) throw DimensionError("diag_minimizer: empty matrix");
  const Vector s = x.rowwise().squaredNorm();
  const double floor = kRankTol * x.norm();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(std::sqrt(s(i)) > floor)) {
      throw RankDeficientError("diag_minimizer: row " + std::to_string(i) + " is zero");
    }
  }
  const Eigen::ArrayXd log_s = s.array().log();
  const Vector d = (0.5 * (log_s - log_s.mean())).exp().matrix();
  return d.asDiagonal();
}

UnitDiagFactors unit_diag_minimizer(const Matrix& x) {
  auto [l0, q0] = lq(x);
  const Vector f = l0.diagonal();
  Matrix l = l0 * f.cwiseInverse().asDiagonal();
  l.diagonal().setOnes();
  return {std::move(l), f.asDiagonal() * q0};
}

double cond_lower(const Matrix& l) {
  Matrix inv = Matrix::Identity(l.rows(), l.cols());
  l.triangularView<Eigen::Lower>().solveInPlace(inv);
  return l.norm() * inv.norm();
}

}  // namespace holq
