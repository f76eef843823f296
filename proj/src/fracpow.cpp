#include "sspec/fracpow.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sspec/error.hpp"
#include "sspec/parallel.hpp"

namespace sspec {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

// Largest singular value of the map x -> f(x) by power iteration on f^T f.
template <class F, class Ft>
double power_norm(int dim, F f, Ft ft) {
  std::mt19937 rng(7);
  std::normal_distribution<double> d;
  VectorXd x(dim);
  for (auto& e : x) e = d(rng);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    const VectorXd y = ft(f(x));
    lambda = y.norm();
    if (lambda == 0.0) break;
    x = y / lambda;
  }
  return std::sqrt(lambda);
}

// cos(pi alpha / 2) / (1 - alpha), continuous at alpha = 1.
double tail_limit_coefficient(double alpha) {
  const double d = 1.0 - alpha;
  return d < 1e-12 ? kPi / 2.0 : std::sin(kPi * d / 2.0) / d;
}

struct Panels {
  std::vector<double> u, w;
};

Panels log_panels(double u_lo, double u_hi, double width, int points) {
  const int count = std::max(1, static_cast<int>(std::ceil((u_hi - u_lo) / width)));
  const double step = (u_hi - u_lo) / count;
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(points);
  Panels p;
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < points; ++i) {
      double x, w;
      gsl_integration_glfixed_point(u_lo + k * step, u_lo + (k + 1) * step, i, &x, &w, table);
      p.u.push_back(x);
      p.w.push_back(w);
    }
  gsl_integration_glfixed_table_free(table);
  return p;
}

FracPowResult frac_power_core(const GridOperator& Th, const MatrixXd& v, const QuadratureSpec& q, PowerForm form,
                              int points) {
  const double alpha = q.alpha;
  if (v.rows() != Th.dof()) throw Error(ErrorKind::DimensionMismatch, "field does not match the operator");
  if (q.plane.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "quaternionic plane unit required");
  if (points < 2 || !(q.panel_width > 0.0) || q.series_terms < 1)
    throw Error(ErrorKind::Precondition, "invalid quadrature parameters");
  const int dim = Th.dof();
  const QsFactor T2(Th, 0.0, q.solve_tol);
  const Eigen::SparseMatrix<double> T2t = Th.squared().transpose();
  const double norm_t2 = power_norm(
      dim, [&](const VectorXd& x) -> VectorXd { return Th.apply_squared(x); },
      [&](const VectorXd& x) -> VectorXd { return T2t * x; });
  const double norm_t2_inv = power_norm(
      dim, [&](const VectorXd& x) -> VectorXd { return T2.solve(x); },
      [&](const VectorXd& x) -> VectorXd { return T2.solve_transpose(x); });
  const double t_lo = q.head_ratio / std::sqrt(norm_t2_inv);
  const double t_hi = q.tail_ratio * std::sqrt(norm_t2);
  const Panels nodes = log_panels(std::log(t_lo), std::log(t_hi), q.panel_width, points);

  const Quaternion I = q.plane.as_quaternion();
  const MatrixXd W = Th.apply(v);
  const int count = static_cast<int>(nodes.u.size());
  MatrixXd acc = MatrixXd::Zero(v.rows(), v.cols());

  auto node_term = [&](int k) -> MatrixXd {
    const double t = std::exp(nodes.u[k]);
    const double weight = nodes.w[k] * t / (2.0 * kPi);  // dt = t du; ds_I = -dt cancels the sign of S^{-1}
    const QsFactor Q(Th, t * t, q.solve_tol);
    if (form == PowerForm::Left) {
      // Q^{-1} (T - conj s) s^{alpha-1} T v summed over s = -I t and s = I t
      MatrixXd rhs = MatrixXd::Zero(v.rows(), v.cols());
      for (double sigma : {1.0, -1.0}) {
        const Quaternion s = I * (-sigma * t);
        const MatrixXd Z = left_mul(qpow(s, alpha - 1.0), W);
        rhs += Th.apply(Z) - left_mul(s.conj(), Z);
      }
      return weight * Q.solve(rhs);
    }
    // s^{alpha-1} (T - conj s) Q^{-1} T v
    const MatrixXd U = Q.solve(W);
    const MatrixXd TU = Th.apply(U);
    MatrixXd out = MatrixXd::Zero(v.rows(), v.cols());
    for (double sigma : {1.0, -1.0}) {
      const Quaternion s = I * (-sigma * t);
      out += left_mul(qpow(s, alpha - 1.0), TU - left_mul(s.conj(), U));
    }
    return weight * out;
  };

  const int chunk = std::max(1, thread_count());
  for (int start = 0; start < count; start += chunk) {
    const int len = std::min(chunk, count - start);
    const auto terms = parallel_map<MatrixXd>(len, [&](int i) { return node_term(start + i); });
    for (const auto& term : terms) acc += term;
  }

  // Both branches combined: (1/pi) t^(alpha-1) Q^{-1} (cs T + cc t) T v.
  const double cs = std::sin(kPi * alpha / 2.0);
  const double cc = std::cos(kPi * alpha / 2.0);
  // head: Q^{-1} = sum_k (-1)^k t^{2k} T^{-2k-2}
  MatrixXd A = v, B = T2.solve(W);
  for (int k = 0; k < q.series_terms; ++k) {
    const double sign = (k % 2) ? -1.0 : 1.0;
    const double ea = alpha + 2 * k;
    acc += (sign / kPi) * (cs * std::pow(t_lo, ea) / ea * A + cc * std::pow(t_lo, ea + 1.0) / (ea + 1.0) * B);
    if (k + 1 < q.series_terms) {
      A = T2.solve(A);
      B = T2.solve(B);
    }
  }
  // tail: Q^{-1} = sum_k (-1)^k T^{2k} t^{-2k-2}
  MatrixXd C = Th.apply_squared(v), D = W;
  for (int k = 0; k < q.series_terms; ++k) {
    const double sign = (k % 2) ? -1.0 : 1.0;
    const double cterm = k == 0 ? tail_limit_coefficient(alpha) * std::pow(t_hi, alpha - 1.0)
                                : cc * std::pow(t_hi, alpha - 1.0 - 2 * k) / (1.0 + 2 * k - alpha);
    acc += (sign / kPi) * (cs * std::pow(t_hi, alpha - 2.0 - 2 * k) / (2.0 + 2 * k - alpha) * C + cterm * D);
    if (k + 1 < q.series_terms) {
      C = Th.apply_squared(C);
      D = Th.apply_squared(D);
    }
  }

  FracPowResult r;
  r.value = std::move(acc);
  r.nodes = count;
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  return r;
}

void require_open_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "alpha in (0,1) required");
}

FracPowResult apply_checked(const GridOperator& Th, const MatrixXd& v, const QuadratureSpec& q, PowerForm form) {
  FracPowResult r = frac_power_core(Th, v, q, form, q.points);
  if (q.verify) {
    const FracPowResult fine = frac_power_core(Th, v, q, form, 2 * q.points);
    const double scale = std::max(fine.value.norm(), 1e-300);
    r.verify_change = (fine.value - r.value).norm() / scale;
    if (r.verify_change > q.verify_tol)
      throw Error(ErrorKind::Solver, "fractional-power quadrature did not converge under node doubling");
    r = FracPowResult{fine.value, fine.nodes, fine.t_lo, fine.t_hi, r.verify_change};
  }
  return r;
}

}  // namespace

FracPowResult frac_power_apply(const GridOperator& Th, const MatrixXd& v, const QuadratureSpec& q, PowerForm form) {
  require_open_alpha(q.alpha);
  return apply_checked(Th, v, q, form);
}

double frac_power_scalar(double c, const QuadratureSpec& q) {
  QMatrix T(1);
  T(0, 0) = Quaternion(c);
  const GridOperator op = GridOperator::from_qmatrix(T);
  return frac_power_apply(op, Eigen::Vector4d(1.0, 0.0, 0.0, 0.0), q).value(0, 0);
}

std::array<double, 2> oracle_moments(double mu, double alpha) {
  if (!(mu > 0.0)) throw Error(ErrorKind::Domain, "eigenvalue must be positive");
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  struct Params {
    double mu, power;
  };
  auto integrand = [](double t, void* p) {
    const auto* P = static_cast<Params*>(p);
    return std::pow(t, P->power) / (P->mu + t * t);
  };
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  std::array<double, 2> out{};
  for (int m = 0; m < 2; ++m) {
    Params P{mu, alpha - 1.0 + m};
    gsl_function F{+integrand, &P};
    // split at the scale sqrt(mu) so both pieces are well conditioned
    const double split = std::sqrt(mu);
    double a, ea, b, eb;
    const int s1 = gsl_integration_qags(&F, 0.0, split, 0.0, 1e-13, 2000, ws, &a, &ea);
    const int s2 = gsl_integration_qagiu(&F, split, 0.0, 1e-13, 2000, ws, &b, &eb);
    const double total = a + b;
    if ((s1 || s2) && (ea + eb) > 1e-11 * std::abs(total)) {
      gsl_integration_workspace_free(ws);
      throw Error(ErrorKind::Solver, "adaptive moment quadrature failed");
    }
    out[m] = total;
  }
  gsl_integration_workspace_free(ws);
  return out;
}

ScalarSpectrum scalar_spectrum(const GridOperator& Th) {
  if (!Th.scalar_square()) throw Error(ErrorKind::Precondition, "T^2 does not act componentwise");
  const MatrixXd O = MatrixXd(*Th.scalar_square());
  if ((O - O.transpose()).norm() > 1e-12 * std::max(1.0, O.norm()))
    throw Error(ErrorKind::Precondition, "T^2 is not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(O);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "eigenvalue solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

MatrixXd commuting_oracle(const GridOperator& Th, const MatrixXd& v, double alpha) {
  require_open_alpha(alpha);
  if (!Th.constant_coefficients()) throw Error(ErrorKind::Precondition, "oracle requires constant coefficients");
  if (v.rows() != Th.dof()) throw Error(ErrorKind::DimensionMismatch, "field does not match the operator");
  const ScalarSpectrum sp = scalar_spectrum(Th);
  const auto n = sp.mu.size();
  VectorXd wa(n), wb(n);
  const double cs = std::sin(kPi * alpha / 2.0), cc = std::cos(kPi * alpha / 2.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto m = oracle_moments(sp.mu(k), alpha);
    wa(k) = cs * m[0] * sp.mu(k) / kPi;
    wb(k) = cc * m[1] / kPi;
  }
  MatrixXd Y(v.rows(), v.cols()), Z(v.rows(), v.cols());
  for (int c = 0; c < 4; ++c) {
    const MatrixXd coeff = sp.U.transpose() * component(v, c);
    const MatrixXd y = sp.U * (wa.asDiagonal() * coeff);
    const MatrixXd z = sp.U * (wb.asDiagonal() * coeff);
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(n); ++p) {
      Y.row(4 * p + c) = y.row(p);
      Z.row(4 * p + c) = z.row(p);
    }
  }
  return Y + Th.apply(Z);
}

ConsistencyReport consistency_identity_check(const BoxGrid& g, double alpha, const VectorXd& v,
                                             const QuadratureSpec& q) {
  require_open_alpha(alpha);
  if (v.size() != g.nodes()) throw Error(ErrorKind::DimensionMismatch, "field does not match the grid");
  const Coefficients ones{CoefficientField::constant(1.0), CoefficientField::constant(1.0),
                          CoefficientField::constant(1.0)};
  const GridOperator grad = discretize(ones, g);
  const ScalarSpectrum sp = scalar_spectrum(grad);
  const int n = g.nodes();
  QuadratureSpec qa = q;
  qa.alpha = alpha;

  // probe eigenvectors across the spectrum, then the requested field
  const std::vector<int> probes{0, n / 4, n / 2, (3 * n) / 4, n - 1};
  MatrixXd cols(n, probes.size() + 1);
  for (std::size_t i = 0; i < probes.size(); ++i) cols.col(i) = sp.U.col(probes[i]);
  cols.col(probes.size()) = v;
  const MatrixXd P = frac_power_apply(grad, lift_real(cols), qa).value;
  MatrixXd vec = P;
  for (Eigen::Index p = 0; p < n; ++p) vec.row(4 * p).setZero();
  const MatrixXd lhs = 2.0 * div_h(g, vec);

  ConsistencyReport r;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const VectorXd rhs_i = std::pow(sp.mu(probes[i]), (1.0 + alpha) / 2.0) * sp.U.col(probes[i]);
    const double ratio = lhs.col(i).dot(rhs_i) / rhs_i.squaredNorm();
    const double field_dev = (lhs.col(i) - ratio * rhs_i).norm() / (std::abs(ratio) * rhs_i.norm());
    if (i == 0) r.measured_constant = ratio;
    r.eigen_spread = std::max({r.eigen_spread, std::abs(ratio - r.measured_constant) / std::abs(r.measured_constant),
                               field_dev});
  }
  const VectorXd powers = sp.mu.array().pow((1.0 + alpha) / 2.0);
  r.rhs = sp.U * (powers.asDiagonal() * (sp.U.transpose() * v));
  r.lhs = lhs.col(probes.size());
  r.relative_error = (r.lhs - r.measured_constant * r.rhs).norm() / (std::abs(r.measured_constant) * r.rhs.norm());
  return r;
}

MatrixXd heat_operator(const BoxGrid& g, const Coefficients& a, double alpha, const QuadratureSpec& q) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Domain, "alpha in (0,1] required");
  const int n = g.nodes();
  if (n > kHeatNodeBudget)
    throw Error(ErrorKind::Budget, "dense heat operator needs at most " + std::to_string(kHeatNodeBudget) + " nodes");
  const GridOperator flux = discretize(a, g).negated();
  QuadratureSpec qa = q;
  qa.alpha = alpha;
  qa.verify = false;
  MatrixXd P = frac_power_core(flux, lift_real(MatrixXd::Identity(n, n)), qa, PowerForm::Left, qa.points).value;
  for (Eigen::Index p = 0; p < n; ++p) P.row(4 * p).setZero();
  return 2.0 * div_h(g, P);
}

HeatTrajectory heat_step(const BoxGrid& g, const Coefficients& a, double alpha, const VectorXd& f0, double dt,
                         int steps, const QuadratureSpec& q) {
  if (f0.size() != g.nodes()) throw Error(ErrorKind::DimensionMismatch, "initial field does not match the grid");
  if (!(dt > 0.0) || steps < 0) throw Error(ErrorKind::Precondition, "dt > 0 and steps >= 0 required");
  HeatTrajectory tr;
  auto record = [&](const VectorXd& v, double t) {
    tr.fields.push_back(v);
    tr.times.push_back(t);
    tr.l2.push_back(std::sqrt(v.squaredNorm() * g.cell_volume()));
  };
  record(f0, 0.0);
  if (steps == 0) return tr;
  MatrixXd A = dt * heat_operator(g, a, alpha, q);
  A.diagonal().array() += 1.0;
  const Eigen::PartialPivLU<MatrixXd> lu(A);
  VectorXd v = f0;
  for (int k = 1; k <= steps; ++k) {
    v = lu.solve(v);
    if (!v.allFinite()) throw Error(ErrorKind::Solver, "heat step produced non-finite values");
    record(v, k * dt);
  }
  return tr;
}

}  // namespace sspec
