#include "sspec/qmatrix.hpp"

#include <cmath>

namespace sspec {

namespace {

using cd = std::complex<double>;

void require_same_shape(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::DimensionMismatch, "matrix shapes differ");
}

}  // namespace

QMatrix::QMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {
  if (rows < 0 || cols < 0) throw Error(ErrorKind::DimensionMismatch, "negative matrix size");
}

QMatrix QMatrix::identity(int m) { return scalar(m, Quaternion(1.0)); }

QMatrix QMatrix::scalar(int m, const Quaternion& q) {
  QMatrix r(m);
  for (int i = 0; i < m; ++i) r(i, i) = q;
  return r;
}

QMatrix QMatrix::diag(const std::vector<Quaternion>& d) {
  QMatrix r(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) r(i, i) = d[i];
  return r;
}

QMatrix QMatrix::column(const std::vector<Quaternion>& v) {
  QMatrix r(static_cast<int>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) r(i, 0) = v[i];
  return r;
}

QMatrix QMatrix::from_components(const Eigen::MatrixXd& t0, const Eigen::MatrixXd& t1, const Eigen::MatrixXd& t2,
                                 const Eigen::MatrixXd& t3) {
  const auto r = static_cast<int>(t0.rows()), c = static_cast<int>(t0.cols());
  for (const auto* t : {&t1, &t2, &t3})
    if (t->rows() != r || t->cols() != c) throw Error(ErrorKind::DimensionMismatch, "component shapes differ");
  QMatrix q(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) q(i, j) = {t0(i, j), t1(i, j), t2(i, j), t3(i, j)};
  return q;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
  QMatrix r = *this;
  return r += o;
}

QMatrix& QMatrix::operator+=(const QMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
  require_same_shape(*this, o);
  QMatrix r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] -= o.a_[k];
  return r;
}

QMatrix QMatrix::operator-() const { return *this * -1.0; }

QMatrix QMatrix::operator*(double s) const {
  QMatrix r = *this;
  for (auto& q : r.a_) q *= s;
  return r;
}

QMatrix QMatrix::operator*(const QMatrix& o) const {
  if (cols_ != o.rows_) throw Error(ErrorKind::DimensionMismatch, "inner matrix dimensions differ");
  QMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Quaternion a = (*this)(i, k);
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

QMatrix QMatrix::scale_left(const Quaternion& q) const {
  QMatrix r = *this;
  for (auto& a : r.a_) a = q * a;
  return r;
}

QMatrix QMatrix::scale_right(const Quaternion& q) const {
  QMatrix r = *this;
  for (auto& a : r.a_) a = a * q;
  return r;
}

Eigen::MatrixXd QMatrix::component(int c) const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      const Quaternion& q = (*this)(i, j);
      m(i, j) = c == 0 ? q.w : c == 1 ? q.x : c == 2 ? q.y : q.z;
    }
  return m;
}

double QMatrix::norm() const {
  double s = 0.0;
  for (const auto& q : a_) s += q.norm2();
  return std::sqrt(s);
}

double QMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& q : a_) s = std::max(s, q.norm());
  return s;
}

Eigen::MatrixXcd complex_adjoint(const QMatrix& T) {
  const int r = T.rows(), c = T.cols();
  Eigen::MatrixXcd C(2 * r, 2 * c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const Quaternion& q = T(i, j);
      const cd a(q.w, q.x), b(q.y, q.z);
      C(i, j) = a;
      C(i, j + c) = b;
      C(i + r, j) = -std::conj(b);
      C(i + r, j + c) = std::conj(a);
    }
  return C;
}

QMatrix from_complex_adjoint(const Eigen::MatrixXcd& C) {
  if (C.rows() % 2 || C.cols() % 2) throw Error(ErrorKind::DimensionMismatch, "complex adjoint needs even sizes");
  const auto r = static_cast<int>(C.rows() / 2), c = static_cast<int>(C.cols() / 2);
  QMatrix T(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const cd a = C(i, j), b = C(i, j + c);
      T(i, j) = {a.real(), a.imag(), b.real(), b.imag()};
    }
  return T;
}

QMatrix embed_complex(const Eigen::MatrixXcd& M) {
  QMatrix T(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
  for (int i = 0; i < T.rows(); ++i)
    for (int j = 0; j < T.cols(); ++j) T(i, j) = {M(i, j).real(), M(i, j).imag()};
  return T;
}

QMatrix solve(const QMatrix& A, const QMatrix& B) {
  if (!A.square() || A.rows() != B.rows()) throw Error(ErrorKind::DimensionMismatch, "solve: incompatible shapes");
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(complex_adjoint(A));
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::Solver, "quaternionic matrix is numerically singular");
  return from_complex_adjoint(lu.solve(complex_adjoint(B)));
}

QMatrix inverse(const QMatrix& T) { return solve(T, QMatrix::identity(T.rows())); }

QMatrix power(const QMatrix& T, int m) {
  if (!T.square() || m < 0) throw Error(ErrorKind::DimensionMismatch, "power needs a square matrix and m >= 0");
  QMatrix r = QMatrix::identity(T.rows());
  for (int k = 0; k < m; ++k) r = r * T;
  return r;
}

}  // namespace sspec
