#pragma once

// Dense quaternionic matrices acting on column vectors from the left, with the
// complex adjoint used for solves and eigenvalues.
//
// A quaternion scalar q enters operator expressions as the diagonal matrix
// q I, i.e. by left multiplication of every entry; this is right linear on
// H^m. Scaling a vector v by q on the right is scale_right(v, q).

#include <Eigen/Dense>
#include <vector>

#include "sspec/hypercomplex.hpp"

namespace sspec {

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(int rows, int cols);
  explicit QMatrix(int m) : QMatrix(m, m) {}

  static QMatrix identity(int m);
  static QMatrix diag(const std::vector<Quaternion>& d);
  static QMatrix scalar(int m, const Quaternion& q);
  static QMatrix column(const std::vector<Quaternion>& v);
  // Real component matrices T = T0 + T1 e1 + T2 e2 + T3 e3.
  static QMatrix from_components(const Eigen::MatrixXd& t0, const Eigen::MatrixXd& t1, const Eigen::MatrixXd& t2,
                                 const Eigen::MatrixXd& t3);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Quaternion& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Quaternion& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  QMatrix operator+(const QMatrix& o) const;
  QMatrix operator-(const QMatrix& o) const;
  QMatrix operator-() const;
  QMatrix operator*(const QMatrix& o) const;
  QMatrix operator*(double s) const;
  QMatrix& operator+=(const QMatrix& o);

  // q * A (entries q a_ij) and A * q (entries a_ij q).
  QMatrix scale_left(const Quaternion& q) const;
  QMatrix scale_right(const Quaternion& q) const;

  // Real part matrix of component c (0 = real, 1..3 = e1..e3).
  Eigen::MatrixXd component(int c) const;

  double norm() const;  // Frobenius
  double max_abs() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Quaternion> a_;
};

// Entry q = a + b e2 with a = w + x i, b = y + z i; block form [[A, B], [-conj B, conj A]].
Eigen::MatrixXcd complex_adjoint(const QMatrix& T);
// Inverse of complex_adjoint on matrices with the block structure above.
QMatrix from_complex_adjoint(const Eigen::MatrixXcd& C);
// Embeds a complex matrix into the plane C_{e1}.
QMatrix embed_complex(const Eigen::MatrixXcd& M);

// Throws ErrorKind::Solver when the matrix is numerically singular.
QMatrix inverse(const QMatrix& T);
// Solves A X = B.
QMatrix solve(const QMatrix& A, const QMatrix& B);

QMatrix power(const QMatrix& T, int m);

}  // namespace sspec
