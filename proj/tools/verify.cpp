#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "sspec/error.hpp"
#include "sspec/fracpow.hpp"
#include "sspec/fueter.hpp"
#include "sspec/scalc.hpp"

namespace sspec::verify {

namespace {

#ifdef SSPEC_INJECT_FAULT
constexpr double kFault = 1e-6;
#else
constexpr double kFault = 0.0;
#endif

Row upper(const std::string& suite, const std::string& name, double measured, double bound) {
  return {suite, name, measured, bound, false, measured <= bound};
}

Row lower(const std::string& suite, const std::string& name, double measured, double bound) {
  return {suite, name, measured, bound, true, measured >= bound};
}

Quaternion random_q(std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  return {d(rng), d(rng), d(rng), d(rng)};
}

Multivector random_para(std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  const std::vector<double> v{d(rng), d(rng), d(rng)};
  return Multivector::paravector(3, d(rng), v);
}

QMatrix random_qmatrix(std::mt19937& rng, int m, double scale) {
  QMatrix T(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) T(i, j) = random_q(rng, scale);
  return T;
}

double rel(const QMatrix& a, const QMatrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

std::vector<Row> kernels() {
  const std::string s = "kernels";
  std::vector<Row> rows;
  std::mt19937 rng(101);

  double id = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const Quaternion a = random_q(rng), x = random_q(rng);
    const Quaternion l = cauchy_kernel_left(a, x);
    id = std::max(id, (l - cauchy_kernel_right_form(a, x)).norm() / l.norm());
    const Multivector pa = random_para(rng), px = random_para(rng);
    const Multivector pl = cauchy_kernel_left(pa, px);
    id = std::max(id, (pl - cauchy_kernel_right_form(pa, px)).norm() / pl.norm());
  }
  rows.push_back(upper(s, "kernel-identity", id + kFault, 1e-12));

  double series = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Multivector a = random_para(rng);
    Multivector x = random_para(rng);
    x = x * (0.25 * a.norm() / x.norm() * std::uniform_real_distribution<double>(0.1, 1.0)(rng));
    const Multivector exact = cauchy_kernel_left(a, x);
    series = std::max(series, (kernel_series(a, x, 60) - exact).norm() / exact.norm());
  }
  rows.push_back(upper(s, "kernel-series", series, 1e-10));

  double niven = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Quaternion a = random_q(rng), q = random_q(rng);
    niven = std::max(niven, niven_residual(a, q) / (1.0 + a.norm2() + q.norm2()));
  }
  rows.push_back(upper(s, "niven-residual", niven, 1e-11));

  // second-order convergence of the finite-difference Laplacian to the closed form
  const std::vector<double> sv{2.0, -0.5, 1.0}, xv{0.3, 0.5, -0.1};
  const Multivector a = Multivector::paravector(3, 1.5, sv), x = Multivector::paravector(3, -0.2, xv);
  const Multivector exact = laplacian_power_kernel(a, x, 1);
  auto fd = [&](double h) {
    Multivector sum(3);
    const Multivector c = cauchy_kernel_left(a, x) * 2.0;
    for (int ax = 0; ax <= 3; ++ax) {
      const std::uint32_t blade = ax == 0 ? 0u : (1u << (ax - 1));
      Multivector p = x, m = x;
      p[blade] += h;
      m[blade] -= h;
      sum += cauchy_kernel_left(a, p) + cauchy_kernel_left(a, m) - c;
    }
    return (sum * (1.0 / (h * h)) - exact).norm() / exact.norm();
  };
  rows.push_back(lower(s, "laplacian-order", fd(4e-2) / fd(2e-2), 3.5));
  return rows;
}

std::vector<Row> calculus() {
  const std::string s = "calculus";
  std::vector<Row> rows;
  std::mt19937 rng(202);
  const ImaginaryUnit e1({1.0, 0.0, 0.0});

  double poly = 0.0;
  for (int t = 0; t < 3; ++t) {
    const QMatrix T = random_qmatrix(rng, 4, 0.5);
    const Contour ct = default_contour(s_spectrum(T), e1);
    for (int m = 0; m <= 4; ++m) poly = std::max(poly, rel(s_functional_calculus(T, SliceFunction::monomial(m), ct), power(T, m)));
  }
  rows.push_back(upper(s, "polynomial-compatibility", poly, 1e-10));

  std::normal_distribution<double> d(0.0, 0.6);
  Eigen::MatrixXcd M(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M(i, j) = {d(rng), d(rng)};
  const QMatrix TM = embed_complex(M);
  const Contour cm = default_contour(s_spectrum(TM), e1);
  const QMatrix fT = s_functional_calculus(TM, SliceFunction::exp(), cm);
  rows.push_back(upper(s, "riesz-dunford", rel(fT, embed_complex(riesz_dunford_oracle(M, HoloFn::exp(), cm.center, cm.radius, 256))), 1e-10));

  const QMatrix P = random_qmatrix(rng, 3, 1.0);
  std::vector<Quaternion> lam;
  for (int k = 0; k < 3; ++k) lam.push_back(random_q(rng, 0.6));
  const QMatrix T = P * QMatrix::diag(lam) * inverse(P);
  const QMatrix eT = s_functional_calculus(T, SliceFunction::exp(), default_contour(s_spectrum(T), e1, 256));
  double eig = 0.0;
  for (int k = 0; k < 3; ++k) {
    std::vector<Quaternion> v;
    for (int i = 0; i < 3; ++i) v.push_back(P(i, k));
    eig = std::max(eig, eigen_relation_residual(eT, v, lam[k], SliceFunction::exp()));
  }
  rows.push_back(upper(s, "eigen-relation", eig, 1e-9));

  const QMatrix U = random_qmatrix(rng, 3, 0.5);
  const SliceFunction g = SliceFunction::polynomial({Quaternion(0.5), Quaternion(0.0, 1.0, 0.0, -1.0)});
  rows.push_back(upper(s, "product-rule",
                       product_rule_check(U, SliceFunction::exp(), g, default_contour(s_spectrum(U), e1, 256)), 1e-9));
  return rows;
}

std::vector<Row> fracpow() {
  const std::string s = "fracpow";
  std::vector<Row> rows;
  QuadratureSpec q;
  q.alpha = 0.5;
  rows.push_back(upper(s, "scalar-power", std::abs(frac_power_scalar(4.0, q) - 2.0), 1e-9));

  const BoxGrid g({1.0, 1.0, 1.0}, {4, 4, 4});
  const Coefficients var{CoefficientField::trigonometric(1.0, 0.1, 1, {1}, g.L),
                         CoefficientField::affine(1.2, {0.0, 0.1, 0.0}),
                         CoefficientField::trigonometric(0.9, 0.1, 1, {1, 3}, g.L)};
  const GridOperator T = discretize(var, g);
  std::mt19937 rng(303);
  std::normal_distribution<double> d;
  Eigen::VectorXd v(g.dof());
  for (auto& e : v) e = d(rng);
  const Eigen::MatrixXd left = frac_power_apply(T, v, q, PowerForm::Left).value;
  const Eigen::MatrixXd right = frac_power_apply(T, v, q, PowerForm::Right).value;
  rows.push_back(upper(s, "left-right", (left - right).norm() / left.norm(), 1e-8));
  QuadratureSpec qp = q;
  qp.plane = ImaginaryUnit({0.3, -0.8, 0.5});
  rows.push_back(upper(s, "plane-independence", (frac_power_apply(T, v, qp).value - left).norm() / left.norm(), 1e-8));

  const Coefficients unit{CoefficientField::constant(1.0), CoefficientField::constant(1.0),
                          CoefficientField::constant(1.0)};
  const GridOperator G = discretize(unit, g);
  const Eigen::MatrixXd P = frac_power_apply(G, v, q).value;
  const Eigen::MatrixXd O = commuting_oracle(G, v, 0.5);
  rows.push_back(upper(s, "commuting-oracle", (P - O).norm() / O.norm(), 1e-8));

  const Eigen::VectorXd w = v.head(g.nodes());
  rows.push_back(upper(s, "consistency-constancy", consistency_identity_check(g, 0.5, w).eigen_spread, 1e-6));
  return rows;
}

}  // namespace

std::vector<Row> run_suite(const std::string& name) {
  const std::vector<std::pair<std::string, std::function<std::vector<Row>()>>> suites{
      {"kernels", kernels}, {"calculus", calculus}, {"fracpow", fracpow}};
  std::vector<Row> out;
  bool found = false;
  for (const auto& [n, fn] : suites)
    if (name == "all" || name == n) {
      found = true;
      const auto rows = fn();
      out.insert(out.end(), rows.begin(), rows.end());
    }
  if (!found) throw Error(ErrorKind::Parse, "unknown suite '" + name + "' (kernels | calculus | fracpow | all)");
  return out;
}

}  // namespace sspec::verify
