#pragma once

// S-spectrum, S-resolvents and the S-functional calculus for quaternionic
// matrices; F-functional and monogenic functional calculi for commuting
// paravector tuples of real matrices; the oracles that cross-check them.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sspec/qmatrix.hpp"
#include "sspec/slicefn.hpp"

namespace sspec {

// Spheres (Re l, |Im l|) over the eigenvalues l of complex_adjoint(T).
SphereSet s_spectrum(const QMatrix& T);

// T^2 - 2 Re(s) T + |s|^2 I
QMatrix qs_matrix(const QMatrix& T, const Quaternion& s);

// Smallest singular value of complex_adjoint(qs_matrix(T, u + v e1)).
double qs_sigma_min(const QMatrix& T, double u, double v);

struct ScanMinimum {
  double u = 0.0, v = 0.0;
  double sigma = 0.0;
};

struct SpectrumScan {
  std::vector<ScanMinimum> minima;  // refined local minima with sigma below zero_tol
  double min_off_spectrum = 0.0;    // smallest grid sigma farther than exclusion from every sphere
  bool consistent = false;          // minima and spheres match one to one
};

// Brute-force definitional check: grid over [u_lo, u_hi] x [0, v_hi], local
// minima refined by Nelder-Mead, matched against s_spectrum(T).
SpectrumScan scan_s_spectrum(const QMatrix& T, int grid = 81, double zero_tol = 1e-8, double exclusion = 0.1);

// -Q_s(T)^{-1} (T - conj(s) I) and -(T - conj(s) I) Q_s(T)^{-1}. Throws
// ErrorKind::SingularSphere when s lies in the S-spectrum.
QMatrix s_resolvent_left(const QMatrix& T, const Quaternion& s);
QMatrix s_resolvent_right(const QMatrix& T, const Quaternion& s);

// sum_{k=0}^{terms} T^k s^{-1-k}
QMatrix resolvent_series(const QMatrix& T, const Quaternion& s, int terms);

// Circle in plane centred at (max u + min u)/2 with 1.25 times the covering
// radius of the spheres (radius 1 when the spectrum is a single real point).
Contour default_contour(const SphereSet& spectrum, const ImaginaryUnit& plane, int nodes = 128);

// Throws unless every sphere lies strictly inside the disc of ct.
void require_enclosed(const SphereSet& spectrum, const Contour& ct);

// (1/2 pi) \oint S_L^{-1}(s, T) ds_I f(s), trapezoidal rule.
QMatrix s_functional_calculus(const QMatrix& T, const SliceFunction& f, const Contour& ct);

struct CalculusResult {
  QMatrix value;
  int nodes = 0;
  double change = 0.0;  // difference to the half-node result
};

// Default contour, doubling the node count from 128 until successive results
// differ by at most tol (relative) or max_nodes is reached.
CalculusResult s_functional_calculus_auto(const QMatrix& T, const SliceFunction& f, const ImaginaryUnit& plane,
                                          double tol = 1e-12, int max_nodes = 4096);

// P diag(f(lambda)) P^{-1} for T = P diag(lambda) P^{-1}, i.e. T P_k = P_k lambda_k.
// Refuses non-intrinsic f with ErrorKind::Precondition.
QMatrix intrinsic_eigen_oracle(const QMatrix& P, const std::vector<Quaternion>& lambda, const SliceFunction& f);

// |f(T) v - v f(lambda)| for a right eigenpair (v, lambda) and a computed f(T).
double eigen_relation_residual(const QMatrix& fT, const std::vector<Quaternion>& v, const Quaternion& lambda,
                               const SliceFunction& f);

// |(f * g)(T) - f(T) g(T)| with all three computed on ct.
double product_rule_check(const QMatrix& T, const SliceFunction& f, const SliceFunction& g, const Contour& ct);

// (1/2 pi i) \oint (l - M)^{-1} f(l) dl on the circle |l - c| = r.
Eigen::MatrixXcd riesz_dunford_oracle(const Eigen::MatrixXcd& M, const HoloFn& f, double center, double radius,
                                      int nodes);

// Matrix with R_n-valued entries stored as 2^n real component matrices.
class MvMatrix {
 public:
  MvMatrix() = default;
  MvMatrix(int n, int m);

  static MvMatrix identity(int n, int m);

  int dim() const { return n_; }
  int size() const { return m_; }
  Eigen::MatrixXd& operator[](std::uint32_t blade) { return c_[blade]; }
  const Eigen::MatrixXd& operator[](std::uint32_t blade) const { return c_[blade]; }

  MvMatrix operator+(const MvMatrix& o) const;
  MvMatrix operator-(const MvMatrix& o) const;
  MvMatrix operator*(const MvMatrix& o) const;
  MvMatrix operator*(const Multivector& a) const;  // entries times a on the right
  MvMatrix operator*(double s) const;
  MvMatrix& operator+=(const MvMatrix& o);
  friend MvMatrix operator*(const Multivector& a, const MvMatrix& M);

  double norm() const;  // Frobenius over all components

 private:
  int n_ = 0, m_ = 0;
  std::vector<Eigen::MatrixXd> c_;
};

// T = T_0 + sum_j e_j T_j with real m x m components, n = components - 1.
struct ParavectorOpTuple {
  std::vector<Eigen::MatrixXd> t;
  bool commuting = false;

  static ParavectorOpTuple make(std::vector<Eigen::MatrixXd> components);
  // Reads the real components of a quaternionic matrix as T_0 + sum_j e_j T_j.
  static ParavectorOpTuple from_qmatrix(const QMatrix& T);

  int n() const { return static_cast<int>(t.size()) - 1; }
  int size() const { return static_cast<int>(t[0].rows()); }
  MvMatrix as_mv() const;
  MvMatrix conj_mv() const;
};

// Commutative S-spectrum: s with s^2 - 2 T_0 s + T_0^2 + sum T_j^2 singular.
SphereSet commutative_s_spectrum(const ParavectorOpTuple& T);

// (1/2 pi) \oint F_L(s, T) ds_I f(s) with
// F_L(s, T) = gamma_3 (s - conj T)(s^2 - (T + conj T) s + T conj T)^{-2}.
MvMatrix f_functional_calculus(const ParavectorOpTuple& T, const SliceFunction& f, const Contour& ct);

struct SphereQuadrature {
  double radius = 1.0;
  int nodes = 24;  // per angle
};

// \oint_{|w| = R} G_w(A) eta(w) fc(w) dS(w) with A_0 = 0, symmetric commuting A_j.
MvMatrix monogenic_functional_calculus(const ParavectorOpTuple& A,
                                       const std::function<Multivector(const Multivector&)>& fc,
                                       const SphereQuadrature& q);

// sum_k v_k v_k^T g(x_k) over an orthonormal joint eigenbasis of symmetric
// commuting components, x_k the paravector of joint eigenvalues.
MvMatrix joint_eigen_oracle(const ParavectorOpTuple& T, const std::function<Multivector(const Multivector&)>& g);

}  // namespace sspec
