#include "sspec/scalc.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "sspec/fueter.hpp"
#include "sspec/parallel.hpp"

namespace sspec {

namespace {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

void require_square(const QMatrix& T) {
  if (!T.square() || T.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "a nonempty square matrix is required");
}

Quaternion plane_point(const ImaginaryUnit& plane, cplx z) {
  return Quaternion(z.real()) + plane.as_quaternion() * z.imag();
}

}  // namespace

SphereSet s_spectrum(const QMatrix& T) {
  require_square(T);
  Eigen::ComplexEigenSolver<MatrixXcd> es(complex_adjoint(T), false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "eigenvalue solver failed");
  SphereSet s;
  for (const cd& l : es.eigenvalues()) s.insert(l.real(), std::abs(l.imag()));
  return s;
}

QMatrix qs_matrix(const QMatrix& T, const Quaternion& s) {
  require_square(T);
  return T * T - T * (2.0 * s.w) + QMatrix::scalar(T.rows(), Quaternion(s.norm2()));
}

double qs_sigma_min(const QMatrix& T, double u, double v) {
  const MatrixXcd Q = complex_adjoint(qs_matrix(T, Quaternion(u, v)));
  Eigen::JacobiSVD<MatrixXcd> svd(Q);
  return svd.singularValues().minCoeff();
}

namespace {

struct ScanTarget {
  const QMatrix* T;
};

double scan_objective(const gsl_vector* p, void* params) {
  const auto* t = static_cast<ScanTarget*>(params);
  return qs_sigma_min(*t->T, gsl_vector_get(p, 0), std::abs(gsl_vector_get(p, 1)));
}

ScanMinimum refine_minimum(const QMatrix& T, double u, double v, double step) {
  ScanTarget target{&T};
  gsl_multimin_function fn{&scan_objective, 2, &target};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(2), &gsl_vector_free);
  gsl_vector_set(x.get(), 0, u);
  gsl_vector_set(x.get(), 1, v);
  gsl_vector_set_all(ss.get(), step);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), ss.get());
  for (int it = 0; it < 4000; ++it) {
    if (gsl_multimin_fminimizer_iterate(nm.get())) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-14) == GSL_SUCCESS) break;
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(nm.get());
  return {gsl_vector_get(best, 0), std::abs(gsl_vector_get(best, 1)), gsl_multimin_fminimizer_minimum(nm.get())};
}

}  // namespace

SpectrumScan scan_s_spectrum(const QMatrix& T, int grid, double zero_tol, double exclusion) {
  require_square(T);
  if (grid < 5) throw Error(ErrorKind::Precondition, "scan grid needs at least 5 points per axis");
  const SphereSet spheres = s_spectrum(T);
  const double rho = T.norm() + 0.5;
  const double du = 2.0 * rho / (grid - 1), dv = rho / (grid - 1);
  std::vector<double> sigma(static_cast<std::size_t>(grid) * grid);
  auto at = [&](int i, int j) -> double& { return sigma[static_cast<std::size_t>(i) * grid + j]; };
  parallel_for(grid, [&](int i) {
    for (int j = 0; j < grid; ++j) at(i, j) = qs_sigma_min(T, -rho + i * du, j * dv);
  });

  SpectrumScan out;
  out.min_off_spectrum = std::numeric_limits<double>::infinity();
  SphereSet found(1e-6);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double u = -rho + i * du, v = j * dv;
      bool near = false;
      for (const auto& s : spheres.spheres()) near = near || std::hypot(u - s.u, v - s.v) <= exclusion;
      if (!near) out.min_off_spectrum = std::min(out.min_off_spectrum, at(i, j));
      bool local = true;
      for (int a = -1; a <= 1 && local; ++a)
        for (int b = -1; b <= 1 && local; ++b) {
          const int ii = i + a, jj = j + b;
          if ((a || b) && ii >= 0 && ii < grid && jj >= 0 && jj < grid && at(ii, jj) < at(i, j)) local = false;
        }
      if (!local) continue;
      const ScanMinimum m = refine_minimum(T, u, v, 0.5 * std::max(du, dv));
      if (m.sigma < zero_tol && found.insert(m.u, m.v)) out.minima.push_back(m);
    }

  auto matches = [](double u1, double v1, double u2, double v2) {
    return std::hypot(u1 - u2, v1 - v2) <= 1e-6 * (1.0 + std::hypot(u1, v1));
  };
  bool ok = out.minima.size() == spheres.size();
  for (const auto& s : spheres.spheres()) {
    bool hit = false;
    for (const auto& m : out.minima) hit = hit || matches(s.u, s.v, m.u, m.v);
    ok = ok && hit;
  }
  out.consistent = ok;
  return out;
}

namespace {

// Q_s(T)^{-1} in the complex adjoint, throwing when s is in the S-spectrum.
Eigen::PartialPivLU<MatrixXcd> qs_lu(const MatrixXcd& chiT, const MatrixXcd& chiT2, const Quaternion& s) {
  MatrixXcd Q = chiT2 - (2.0 * s.w) * chiT;
  Q.diagonal().array() += s.norm2();
  Eigen::PartialPivLU<MatrixXcd> lu(Q);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::SingularSphere, "s lies in the S-spectrum of T");
  return lu;
}

QMatrix minus_conj_s(const QMatrix& T, const Quaternion& s) { return T - QMatrix::scalar(T.rows(), s.conj()); }

// -Q_s(T)^{-1} (T - conj(s) I) with precomputed adjoints.
QMatrix resolvent_left(const QMatrix& T, const MatrixXcd& chiT, const MatrixXcd& chiT2, const Quaternion& s) {
  const auto lu = qs_lu(chiT, chiT2, s);
  return -from_complex_adjoint(lu.solve(complex_adjoint(minus_conj_s(T, s))));
}

}  // namespace

QMatrix s_resolvent_left(const QMatrix& T, const Quaternion& s) {
  require_square(T);
  const MatrixXcd chiT = complex_adjoint(T);
  return resolvent_left(T, chiT, chiT * chiT, s);
}

QMatrix s_resolvent_right(const QMatrix& T, const Quaternion& s) {
  require_square(T);
  const MatrixXcd chiT = complex_adjoint(T);
  const auto lu = qs_lu(chiT, chiT * chiT, s);
  const MatrixXcd qinv = lu.inverse();
  return -(minus_conj_s(T, s) * from_complex_adjoint(qinv));
}

QMatrix resolvent_series(const QMatrix& T, const Quaternion& s, int terms) {
  require_square(T);
  const Quaternion sinv = s.inv();
  QMatrix Tk = QMatrix::identity(T.rows());
  Quaternion sk = sinv;
  QMatrix sum(T.rows());
  for (int k = 0; k <= terms; ++k) {
    sum += Tk.scale_right(sk);
    Tk = Tk * T;
    sk = sk * sinv;
  }
  return sum;
}

Contour default_contour(const SphereSet& spectrum, const ImaginaryUnit& plane, int nodes) {
  if (spectrum.size() == 0) throw Error(ErrorKind::Precondition, "empty spectrum");
  double lo = spectrum.spheres().front().u, hi = lo;
  for (const auto& s : spectrum.spheres()) {
    lo = std::min(lo, s.u);
    hi = std::max(hi, s.u);
  }
  const double c = 0.5 * (lo + hi);
  double R = 0.0;
  for (const auto& s : spectrum.spheres()) R = std::max(R, std::hypot(s.u - c, s.v));
  return Contour(plane, c, R > 0.0 ? 1.25 * R : 1.0, nodes);
}

void require_enclosed(const SphereSet& spectrum, const Contour& ct) {
  for (const auto& s : spectrum.spheres()) check_contour_encloses(ct, s.u, s.v);
}

QMatrix s_functional_calculus(const QMatrix& T, const SliceFunction& f, const Contour& ct) {
  require_square(T);
  if (ct.plane.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "quaternionic contour needs a 3-component unit");
  require_enclosed(s_spectrum(T), ct);
  if (!f.holomorphic_on_disc(ct.center, ct.radius))
    throw Error(ErrorKind::Domain, "function is not holomorphic on the contour disc");
  const MatrixXcd chiT = complex_adjoint(T);
  const MatrixXcd chiT2 = chiT * chiT;
  const Quaternion I = ct.plane.as_quaternion();
  const auto terms = parallel_map<QMatrix>(ct.nodes, [&](int k) {
    const cplx z = ct.node(k);
    const Quaternion s = plane_point(ct.plane, z);
    const Quaternion ds = Quaternion(z.real() - ct.center) + I * z.imag();
    const Quaternion fs = f.eval_slice(z.real(), z.imag(), I, I);
    return resolvent_left(T, chiT, chiT2, s).scale_right(ds * fs);
  });
  QMatrix sum(T.rows());
  for (const auto& t : terms) sum += t;
  return sum * (1.0 / ct.nodes);
}

CalculusResult s_functional_calculus_auto(const QMatrix& T, const SliceFunction& f, const ImaginaryUnit& plane,
                                          double tol, int max_nodes) {
  const SphereSet spec = s_spectrum(T);
  Contour ct = default_contour(spec, plane, 128);
  CalculusResult r;
  r.value = s_functional_calculus(T, f, ct);
  r.nodes = ct.nodes;
  r.change = std::numeric_limits<double>::infinity();
  while (ct.nodes < max_nodes) {
    ct.nodes *= 2;
    QMatrix next = s_functional_calculus(T, f, ct);
    r.change = (next - r.value).norm() / std::max(1.0, next.norm());
    r.value = std::move(next);
    r.nodes = ct.nodes;
    if (r.change <= tol) break;
  }
  return r;
}

QMatrix intrinsic_eigen_oracle(const QMatrix& P, const std::vector<Quaternion>& lambda, const SliceFunction& f) {
  if (!f.intrinsic()) throw Error(ErrorKind::Precondition, "eigen oracle requires an intrinsic function");
  if (!P.square() || static_cast<int>(lambda.size()) != P.rows())
    throw Error(ErrorKind::DimensionMismatch, "eigenbasis and eigenvalues differ in size");
  std::vector<Quaternion> fl;
  for (const auto& l : lambda) fl.push_back(eval(f, l));
  return P * QMatrix::diag(fl) * inverse(P);
}

double eigen_relation_residual(const QMatrix& fT, const std::vector<Quaternion>& v, const Quaternion& lambda,
                               const SliceFunction& f) {
  const QMatrix col = QMatrix::column(v);
  return (fT * col - col.scale_right(eval(f, lambda))).norm();
}

double product_rule_check(const QMatrix& T, const SliceFunction& f, const SliceFunction& g, const Contour& ct) {
  const QMatrix fg = s_functional_calculus(T, SliceFunction::star(f, g), ct);
  return (fg - s_functional_calculus(T, f, ct) * s_functional_calculus(T, g, ct)).norm();
}

MatrixXcd riesz_dunford_oracle(const MatrixXcd& M, const HoloFn& f, double center, double radius, int nodes) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::DimensionMismatch, "square matrix required");
  if (!(radius > 0.0) || nodes < 8) throw Error(ErrorKind::Precondition, "invalid contour");
  Eigen::ComplexEigenSolver<MatrixXcd> es(M, false);
  for (const cd& l : es.eigenvalues()) {
    const double d = std::abs(l - cd(center, 0.0));
    if (std::abs(d - radius) < kSingularGuard * (1.0 + radius))
      throw Error(ErrorKind::SingularSphere, "eigenvalue on the contour");
    if (d > radius) throw Error(ErrorKind::Precondition, "contour does not enclose the spectrum");
  }
  const auto m = M.rows();
  MatrixXcd sum = MatrixXcd::Zero(m, m);
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * std::numbers::pi * k / nodes;
    const cd l = cd(center, 0.0) + radius * cd(std::cos(th), std::sin(th));
    MatrixXcd R = -M;
    R.diagonal().array() += l;
    sum += R.partialPivLu().inverse() * (f.value(l) * (l - center));
  }
  return sum / static_cast<double>(nodes);
}

MvMatrix::MvMatrix(int n, int m) : n_(n), m_(m), c_(static_cast<std::size_t>(1) << n, MatrixXd::Zero(m, m)) {
  Multivector probe(n);  // validates n
}

MvMatrix MvMatrix::identity(int n, int m) {
  MvMatrix r(n, m);
  r.c_[0] = MatrixXd::Identity(m, m);
  return r;
}

MvMatrix MvMatrix::operator+(const MvMatrix& o) const {
  MvMatrix r = *this;
  return r += o;
}

MvMatrix& MvMatrix::operator+=(const MvMatrix& o) {
  if (n_ != o.n_ || m_ != o.m_) throw Error(ErrorKind::DimensionMismatch, "operator shapes differ");
  for (std::size_t a = 0; a < c_.size(); ++a) c_[a] += o.c_[a];
  return *this;
}

MvMatrix MvMatrix::operator-(const MvMatrix& o) const { return *this + o * -1.0; }

MvMatrix MvMatrix::operator*(double s) const {
  MvMatrix r = *this;
  for (auto& c : r.c_) c *= s;
  return r;
}

MvMatrix MvMatrix::operator*(const MvMatrix& o) const {
  if (n_ != o.n_ || m_ != o.m_) throw Error(ErrorKind::DimensionMismatch, "operator shapes differ");
  MvMatrix r(n_, m_);
  const auto nb = static_cast<std::uint32_t>(c_.size());
  for (std::uint32_t a = 0; a < nb; ++a) {
    if (c_[a].isZero(0.0)) continue;
    for (std::uint32_t b = 0; b < nb; ++b) {
      if (o.c_[b].isZero(0.0)) continue;
      r.c_[a ^ b].noalias() += static_cast<double>(blade_product_sign(a, b)) * (c_[a] * o.c_[b]);
    }
  }
  return r;
}

MvMatrix MvMatrix::operator*(const Multivector& x) const {
  if (x.dim() != n_) throw Error(ErrorKind::DimensionMismatch, "multivector dimension differs");
  MvMatrix r(n_, m_);
  const auto nb = static_cast<std::uint32_t>(c_.size());
  for (std::uint32_t a = 0; a < nb; ++a) {
    if (c_[a].isZero(0.0)) continue;
    for (std::uint32_t b = 0; b < nb; ++b)
      if (x[b] != 0.0) r.c_[a ^ b] += (blade_product_sign(a, b) * x[b]) * c_[a];
  }
  return r;
}

MvMatrix operator*(const Multivector& x, const MvMatrix& M) {
  if (x.dim() != M.n_) throw Error(ErrorKind::DimensionMismatch, "multivector dimension differs");
  MvMatrix r(M.n_, M.m_);
  const auto nb = static_cast<std::uint32_t>(M.c_.size());
  for (std::uint32_t a = 0; a < nb; ++a) {
    if (x[a] == 0.0) continue;
    for (std::uint32_t b = 0; b < nb; ++b) r.c_[a ^ b] += (blade_product_sign(a, b) * x[a]) * M.c_[b];
  }
  return r;
}

double MvMatrix::norm() const {
  double s = 0.0;
  for (const auto& c : c_) s += c.squaredNorm();
  return std::sqrt(s);
}

ParavectorOpTuple ParavectorOpTuple::make(std::vector<MatrixXd> components) {
  if (components.size() < 2) throw Error(ErrorKind::DimensionMismatch, "a paravector tuple needs T_0 and T_1..T_n");
  const auto m = components[0].rows();
  for (const auto& t : components)
    if (t.rows() != m || t.cols() != m) throw Error(ErrorKind::DimensionMismatch, "components must be square and equal");
  Multivector probe(static_cast<int>(components.size()) - 1);
  ParavectorOpTuple T;
  T.t = std::move(components);
  T.commuting = true;
  for (std::size_t j = 0; j < T.t.size(); ++j)
    for (std::size_t k = j + 1; k < T.t.size(); ++k) {
      const double scale = std::max(1.0, T.t[j].norm() * T.t[k].norm());
      if ((T.t[j] * T.t[k] - T.t[k] * T.t[j]).norm() > 1e-12 * scale) T.commuting = false;
    }
  return T;
}

ParavectorOpTuple ParavectorOpTuple::from_qmatrix(const QMatrix& T) {
  return make({T.component(0), T.component(1), T.component(2), T.component(3)});
}

MvMatrix ParavectorOpTuple::as_mv() const {
  MvMatrix M(n(), size());
  M[0] = t[0];
  for (int j = 1; j <= n(); ++j) M[1u << (j - 1)] = t[j];
  return M;
}

MvMatrix ParavectorOpTuple::conj_mv() const {
  MvMatrix M(n(), size());
  M[0] = t[0];
  for (int j = 1; j <= n(); ++j) M[1u << (j - 1)] = -t[j];
  return M;
}

namespace {

MatrixXd sum_of_squares(const ParavectorOpTuple& T) {
  MatrixXd N = MatrixXd::Zero(T.size(), T.size());
  for (int j = 1; j <= T.n(); ++j) N += T.t[j] * T.t[j];
  return N;
}

void require_commuting(const ParavectorOpTuple& T) {
  if (!T.commuting) throw Error(ErrorKind::Precondition, "commuting components required");
}

}  // namespace

SphereSet commutative_s_spectrum(const ParavectorOpTuple& T) {
  require_commuting(T);
  const int m = T.size();
  // (z - T0)^2 + N = 0 linearized as z [w; y] = [[T0, I], [-N, T0]] [w; y]
  MatrixXd L(2 * m, 2 * m);
  L << T.t[0], MatrixXd::Identity(m, m), -sum_of_squares(T), T.t[0];
  Eigen::EigenSolver<MatrixXd> es(L, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "eigenvalue solver failed");
  SphereSet s;
  for (const cd& l : es.eigenvalues()) s.insert(l.real(), std::abs(l.imag()));
  return s;
}

MvMatrix f_functional_calculus(const ParavectorOpTuple& T, const SliceFunction& f, const Contour& ct) {
  require_commuting(T);
  const int n = T.n(), m = T.size();
  if (ct.plane.dim() != n) throw Error(ErrorKind::DimensionMismatch, "contour plane dimension differs from tuple");
  require_enclosed(commutative_s_spectrum(T), ct);
  if (!f.holomorphic_on_disc(ct.center, ct.radius))
    throw Error(ErrorKind::Domain, "function is not holomorphic on the contour disc");
  const double gamma = constants(n, 0).gamma;
  const int power = (n + 1) / 2;
  const MatrixXd M = T.t[0] * T.t[0] + sum_of_squares(T);
  const MvMatrix Tbar = T.conj_mv();
  const Multivector I = ct.plane.as_multivector();
  const MatrixXd Id = MatrixXd::Identity(m, m);

  const auto terms = parallel_map<MvMatrix>(ct.nodes, [&](int k) {
    const cplx z = ct.node(k);
    const double x = z.real(), y = z.imag();
    // Q(s) = A + I B with commuting real A, B; invert through A + iB
    const MatrixXd A = (x * x - y * y) * Id - 2.0 * x * T.t[0] + M;
    const MatrixXd B = 2.0 * x * y * Id - 2.0 * y * T.t[0];
    const MatrixXcd C = A.cast<cd>() + cd(0.0, 1.0) * B.cast<cd>();
    Eigen::PartialPivLU<MatrixXcd> lu(C);
    if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::SingularSphere, "contour node in the S-spectrum");
    const MatrixXcd Ci = lu.inverse();
    MvMatrix Qinv(n, m);
    Qinv[0] = Ci.real();
    for (int j = 1; j <= n; ++j) Qinv[1u << (j - 1)] = I[1u << (j - 1)] * Ci.imag();
    const Multivector s = Multivector::scalar(n, x) + I * y;
    MvMatrix F = (s * MvMatrix::identity(n, m)) - Tbar;
    for (int p = 0; p < power; ++p) F = F * Qinv;
    const Multivector ds = Multivector::scalar(n, x - ct.center) + I * y;
    const Multivector fs = f.eval_slice(x, y, I, I);
    return F * (ds * fs);
  });
  MvMatrix sum(n, m);
  for (const auto& t : terms) sum += t;
  return sum * (gamma / ct.nodes);
}

namespace {

struct JointEigen {
  MatrixXd V;
  std::vector<Multivector> points;
};

JointEigen joint_eigen(const ParavectorOpTuple& T) {
  require_commuting(T);
  const int n = T.n(), m = T.size();
  MatrixXd C = MatrixXd::Zero(m, m);
  for (int j = 0; j <= n; ++j) {
    if ((T.t[j] - T.t[j].transpose()).norm() > 1e-12 * std::max(1.0, T.t[j].norm()))
      throw Error(ErrorKind::Precondition, "symmetric components required");
    C += (1.0 + std::sqrt(2.0 + j)) * T.t[j];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "eigenvalue solver failed");
  JointEigen J;
  J.V = es.eigenvectors();
  std::vector<MatrixXd> D;
  for (int j = 0; j <= n; ++j) {
    D.push_back(J.V.transpose() * T.t[j] * J.V);
    const MatrixXd off = D.back() - MatrixXd(D.back().diagonal().asDiagonal());
    if (off.norm() > 1e-9 * std::max(1.0, T.t[j].norm()))
      throw Error(ErrorKind::Solver, "components are not simultaneously diagonalized");
  }
  for (int k = 0; k < m; ++k) {
    std::vector<double> v(n);
    for (int j = 1; j <= n; ++j) v[j - 1] = D[j](k, k);
    J.points.push_back(Multivector::paravector(n, D[0](k, k), v));
  }
  return J;
}

}  // namespace

MvMatrix joint_eigen_oracle(const ParavectorOpTuple& T, const std::function<Multivector(const Multivector&)>& g) {
  const JointEigen J = joint_eigen(T);
  const int n = T.n(), m = T.size();
  MvMatrix out(n, m);
  for (int k = 0; k < m; ++k) {
    const MatrixXd P = J.V.col(k) * J.V.col(k).transpose();
    const Multivector gk = g(J.points[k]);
    for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(gk.blade_count()); ++a)
      if (gk[a] != 0.0) out[a] += gk[a] * P;
  }
  return out;
}

MvMatrix monogenic_functional_calculus(const ParavectorOpTuple& A,
                                       const std::function<Multivector(const Multivector&)>& fc,
                                       const SphereQuadrature& q) {
  if (A.n() != 3) throw Error(ErrorKind::DimensionMismatch, "monogenic calculus is implemented for n = 3");
  if (A.t[0].norm() != 0.0) throw Error(ErrorKind::Precondition, "monogenic calculus needs A_0 = 0");
  if (q.nodes < 2 || !(q.radius > 0.0)) throw Error(ErrorKind::Precondition, "invalid sphere quadrature");
  const JointEigen J = joint_eigen(A);
  for (const auto& p : J.points)
    if (p.norm() >= q.radius) throw Error(ErrorKind::Precondition, "joint spectrum outside the integration ball");

  const int m = A.size(), N = q.nodes;
  const double R = q.radius, sigma = constants(3, 0).sigma;
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> gl(
      gsl_integration_glfixed_table_alloc(N), &gsl_integration_glfixed_table_free);
  std::vector<double> xn(N), wn(N);
  for (int i = 0; i < N; ++i) gsl_integration_glfixed_point(0.0, std::numbers::pi, i, &xn[i], &wn[i], gl.get());
  const double wphi = 2.0 * std::numbers::pi / N;
  const MatrixXd Id = MatrixXd::Identity(m, m);

  const auto slabs = parallel_map<MvMatrix>(N, [&](int a) {
    MvMatrix acc(3, m);
    const double psi = xn[a];
    for (int b = 0; b < N; ++b) {
      const double th = xn[b];
      for (int c = 0; c < N; ++c) {
        const double ph = wphi * c;
        const double w[4] = {R * std::cos(psi), R * std::sin(psi) * std::cos(th),
                             R * std::sin(psi) * std::sin(th) * std::cos(ph),
                             R * std::sin(psi) * std::sin(th) * std::sin(ph)};
        MatrixXd P = w[0] * w[0] * Id;
        std::array<MatrixXd, 3> D;
        for (int j = 0; j < 3; ++j) {
          D[j] = w[j + 1] * Id - A.t[j + 1];
          P += D[j] * D[j];
        }
        const MatrixXd Pi = P.llt().solve(Id);
        const MatrixXd Pi2 = Pi * Pi;
        MvMatrix G(3, m);
        G[0] = w[0] * Pi2;
        for (int j = 0; j < 3; ++j) G[1u << j] = -D[j] * Pi2;
        const double vec[3] = {w[1], w[2], w[3]};
        const Multivector omega = Multivector::paravector(3, w[0], vec);
        const double dS = R * R * R * std::sin(psi) * std::sin(psi) * std::sin(th) * wn[a] * wn[b] * wphi;
        acc += G * ((omega * (1.0 / R)) * fc(omega)) * dS;
      }
    }
    return acc;
  });
  MvMatrix sum(3, m);
  for (const auto& s : slabs) sum += s;
  return sum * (1.0 / sigma);
}

}  // namespace sspec
