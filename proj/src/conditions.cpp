#include "sspec/conditions.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "sspec/error.hpp"
#include "sspec/parallel.hpp"

namespace sspec {

namespace {

using Point = std::array<double, 3>;
using Field = std::function<double(const Point&)>;

ConditionRow make_row(std::string text, double lhs, double rhs) {
  return {std::move(text), lhs, rhs, lhs - rhs, lhs - rhs > 0.0};
}

struct Search {
  const Field* f;
  Point lo, hi;
  std::vector<int> free;
  double sign;

  Point place(const gsl_vector* y) const {
    Point x = lo;
    for (std::size_t k = 0; k < free.size(); ++k) {
      const int d = free[k];
      x[d] = std::clamp(gsl_vector_get(y, k), lo[d], hi[d]);
    }
    return x;
  }
};

double search_objective(const gsl_vector* y, void* params) {
  const auto* s = static_cast<const Search*>(params);
  return -s->sign * (*s->f)(s->place(y));
}

double refine(const Search& s, const Point& start, double step) {
  const std::size_t dim = s.free.size();
  gsl_multimin_function fn{&search_objective, dim, const_cast<Search*>(&s)};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(dim), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(dim), &gsl_vector_free);
  for (std::size_t k = 0; k < dim; ++k) {
    gsl_vector_set(x.get(), k, start[s.free[k]]);
    gsl_vector_set(ss.get(), k, step * (s.hi[s.free[k]] - s.lo[s.free[k]]));
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), ss.get());
  for (int it = 0; it < 2000; ++it) {
    if (gsl_multimin_fminimizer_iterate(nm.get())) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-13) == GSL_SUCCESS) break;
  }
  return (*s.f)(s.place(gsl_multimin_fminimizer_x(nm.get())));
}

double box_extremum(const Field& f, const Point& lo, const Point& hi, int samples, double sign) {
  Search s{&f, lo, hi, {}, sign};
  for (int d = 0; d < 3; ++d)
    if (hi[d] > lo[d]) s.free.push_back(d);
  std::vector<std::pair<double, Point>> best;
  const int n = std::max(samples, 2);
  std::array<int, 3> counts{};
  for (int d = 0; d < 3; ++d) counts[d] = hi[d] > lo[d] ? n : 1;
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int k = 0; k < counts[2]; ++k) {
        const std::array<int, 3> m{i, j, k};
        Point x;
        for (int d = 0; d < 3; ++d) x[d] = counts[d] == 1 ? lo[d] : lo[d] + (hi[d] - lo[d]) * m[d] / (n - 1);
        best.emplace_back(sign * f(x), x);
      }
  const std::size_t keep = std::min<std::size_t>(4, best.size());
  std::partial_sort(best.begin(), best.begin() + keep, best.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  double out = best.front().first;
  if (!s.free.empty())
    for (std::size_t r = 0; r < keep; ++r) out = std::max(out, sign * refine(s, best[r].second, 0.5 / n));
  return sign * out;
}

Point zero_point() { return {0.0, 0.0, 0.0}; }

}  // namespace

bool ConditionReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConditionRow& r) { return r.pass; });
}

double ConditionReport::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw Error(ErrorKind::Precondition, "report has no value " + name);
}

bool ConditionReport::flag(const std::string& name) const {
  for (const auto& [k, v] : flags)
    if (k == name) return v;
  throw Error(ErrorKind::Precondition, "report has no flag " + name);
}

double dirichlet_poincare(const std::array<double, 3>& L) {
  double s = 0.0;
  for (double l : L) s += 1.0 / (l * l);
  return 1.0 / std::sqrt(std::numbers::pi * std::numbers::pi * s);
}

double neumann_poincare(const std::array<double, 3>& L) {
  return *std::max_element(L.begin(), L.end()) / std::numbers::pi;
}

double box_sup(const Field& f, const Point& lo, const Point& hi, int samples) {
  return box_extremum(f, lo, hi, samples, 1.0);
}

double box_inf(const Field& f, const Point& lo, const Point& hi, int samples) {
  return box_extremum(f, lo, hi, samples, -1.0);
}

ConditionReport check_dirichlet_conditions(const Coefficients& a, const BoxGrid& g) {
  const Point lo = zero_point(), hi = g.L;
  double min_a = std::numeric_limits<double>::infinity(), inf_a2 = min_a, sup_a2 = 0.0;
  for (const auto& f : a) {
    min_a = std::min(min_a, box_inf([&](const Point& x) { return f.value(x); }, lo, hi));
    inf_a2 = std::min(inf_a2, box_inf([&](const Point& x) { return f.value(x) * f.value(x); }, lo, hi));
    sup_a2 = std::max(sup_a2, box_sup([&](const Point& x) { return f.value(x) * f.value(x); }, lo, hi));
  }
  if (!(min_a > 1e-12 * std::max(1.0, std::sqrt(sup_a2))))
    throw Error(ErrorKind::Domain, "coefficients must be bounded away from 0 (inf a = " + std::to_string(min_a) + ")");
  const double F = box_sup(
      [&](const Point& x) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += std::abs(a[i].gradient(x)[i]);
        return s;
      },
      lo, hi);
  const double C = dirichlet_poincare(g.L);
  const double sup_inv = 1.0 / inf_a2;

  ConditionReport r;
  r.theorem = "dirichlet";
  r.rows.push_back(make_row("min inf a_l^2 - (2 max sup a_l^2)^(1/2) C_Omega |F|_inf > 0", inf_a2,
                            std::sqrt(2.0 * sup_a2) * C * F));
  r.rows.push_back(make_row("1 - 2 |F|_inf (1 + 4 C_Omega^2 max sup 1/a_l^2) > 0", 1.0,
                            2.0 * F * (1.0 + 4.0 * C * C * sup_inv)));
  r.values = {{"C_Omega", C},   {"inf_a2", inf_a2},   {"sup_a2", sup_a2},
              {"F_inf", F},     {"sup_inv_a2", sup_inv}, {"min_a", min_a}};
  return r;
}

double estimate_trace_constant(const std::array<double, 3>& L, int cells) {
  if (cells < 1) throw Error(ErrorKind::Precondition, "trace estimate needs at least one cell");
  const int n = cells + 1;
  std::array<Eigen::MatrixXd, 3> M, K, E;
  for (int d = 0; d < 3; ++d) {
    const double h = L[d] / cells;
    M[d] = Eigen::MatrixXd::Zero(n, n);
    K[d] = Eigen::MatrixXd::Zero(n, n);
    E[d] = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < cells; ++c) {
      M[d](c, c) += h / 3;
      M[d](c + 1, c + 1) += h / 3;
      M[d](c, c + 1) += h / 6;
      M[d](c + 1, c) += h / 6;
      K[d](c, c) += 1 / h;
      K[d](c + 1, c + 1) += 1 / h;
      K[d](c, c + 1) -= 1 / h;
      K[d](c + 1, c) -= 1 / h;
    }
    E[d](0, 0) = E[d](n - 1, n - 1) = 1.0;
  }
  auto kron3 = [](const Eigen::MatrixXd& z, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd out(n * n * n, n * n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            out.block((a * n + c) * n, (b * n + d) * n, n, n) = (z(a, b) * y(c, d)) * x;
    return out;
  };
  const Eigen::MatrixXd H1 = kron3(M[2], M[1], K[0]) + kron3(M[2], K[1], M[0]) + kron3(K[2], M[1], M[0]) +
                             kron3(M[2], M[1], M[0]);
  const Eigen::MatrixXd B = kron3(M[2], M[1], E[0]) + kron3(M[2], E[1], M[0]) + kron3(E[2], M[1], M[0]);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, H1, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "trace constant eigenproblem failed");
  return std::sqrt(es.eigenvalues().maxCoeff());
}

ConditionReport check_robin_conditions(const Coefficients& a, const RobinData& data, const BoxGrid& g) {
  const Point lo = zero_point(), hi = g.L;
  ConditionReport r;
  r.theorem = "robin";

  double C_T = std::numeric_limits<double>::infinity();
  for (const auto& f : a) C_T = std::min(C_T, box_inf([&](const Point& x) { return f.value(x) * f.value(x); }, lo, hi));
  double C_Tp = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l)
      C_Tp += box_sup([&](const Point& x) { return std::abs(a[l].value(x) * a[i].gradient(x)[l]); }, lo, hi);

  double a_sup = 0.0;
  for (int d = 0; d < 3; ++d)
    for (double side : {0.0, g.L[d]}) {
      Point flo = lo, fhi = hi;
      flo[d] = fhi[d] = side;
      a_sup = std::max(a_sup, box_sup([&](const Point& x) { return std::abs(data.a_bdry.value(x)); }, flo, fhi));
    }

  double trace = 0.0;
  bool estimated = false;
  if (data.trace_constant) {
    trace = *data.trace_constant;
    if (!(trace > 0.0)) throw Error(ErrorKind::Precondition, "trace constant must be positive");
  } else if (data.estimate_trace) {
    trace = estimate_trace_constant(g.L);
    estimated = true;
    r.notes.push_back("C_dOmega is a numerical estimate (trilinear elements, L2 boundary trace)");
  } else {
    throw Error(ErrorKind::Precondition, "trace constant missing and estimation disabled");
  }

  const double C_P = neumann_poincare(g.L);
  const double K = trace * trace * a_sup;
  r.rows.push_back(make_row("C_T - C_T' C_P - K (1 + C_P^2) > 0", C_T, C_Tp * C_P + K * (1.0 + C_P * C_P)));
  r.rows.push_back(make_row("C_T > 0", C_T, 0.0));
  r.values = {{"C_T", C_T}, {"C_T_prime", C_Tp}, {"C_P", C_P}, {"C_dOmega", trace}, {"a_bdry_sup", a_sup}, {"K", K}};
  r.flags.emplace_back("C_dOmega_estimated", estimated);

  if (data.b) {
    // boundary rows [b, a_l n_l] of the flux condition and [a, a_l^2 n_l] of the generated one
    const int m = 5;
    std::vector<std::pair<Point, int>> samples;  // point, signed normal direction (+-(d + 1))
    for (int d = 0; d < 3; ++d)
      for (int side = 0; side < 2; ++side)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            Point x{};
            const int u = (d + 1) % 3, v = (d + 2) % 3;
            x[d] = side ? g.L[d] : 0.0;
            x[u] = g.L[u] * (i + 0.5) / m;
            x[v] = g.L[v] * (j + 0.37) / m;
            samples.emplace_back(x, side ? d + 1 : -(d + 1));
          }
    const double mu = a[0].value(samples.front().first);
    double spread25 = 0.0, spread26 = 0.0, dev = 0.0, scale = 0.0;
    for (const auto& [x, nd] : samples) {
      std::array<double, 3> n{};
      n[std::abs(nd) - 1] = nd > 0 ? 1.0 : -1.0;
      const double bv = data.b->value(x), av = data.a_bdry.value(x);
      std::array<double, 4> r21{bv, 0, 0, 0}, r24{av, 0, 0, 0};
      for (int l = 0; l < 3; ++l) {
        const double al = a[l].value(x);
        spread25 = std::max(spread25, std::abs(al - mu));
        r21[l + 1] = al * n[l];
        r24[l + 1] = al * al * n[l];
      }
      spread26 = std::max(spread26, std::abs(av - mu * bv));
      for (int c = 0; c < 4; ++c) {
        dev = std::max(dev, std::abs(r24[c] - mu * r21[c]));
        scale = std::max(scale, std::abs(mu * r21[c]));
      }
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(mu));
    const double rel_dev = scale > 0.0 ? dev / scale : dev;
    r.values.emplace_back("mu", mu);
    r.values.emplace_back("row_deviation", rel_dev);
    r.flags.emplace_back("coefficients_constant_on_boundary", spread25 <= tol);
    r.flags.emplace_back("a_equals_mu_b", spread26 <= tol * std::max(1.0, a_sup));
    r.flags.emplace_back("rows_proportional", rel_dev <= 1e-13);
  }
  return r;
}

double unbounded_m_constant(const Coefficients& a, double half_width, int panel_points) {
  if (!(half_width > 0.0)) throw Error(ErrorKind::Precondition, "truncation half-width must be positive");
  for (const auto& f : a)
    if (!f.has_decay_certificate())
      throw Error(ErrorKind::Precondition, "coefficient kind lacks a decay certificate: " + f.kind_name());
  if (std::all_of(a.begin(), a.end(), [](const CoefficientField& f) { return f.is_constant(); })) return 0.0;

  const double R = half_width;
  // Per axis: break at 0 and near every bump centre, graded outwards.
  std::array<std::vector<double>, 3> nodes, weights;
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(panel_points);
  for (int d = 0; d < 3; ++d) {
    std::vector<double> br{-R, 0.0, R};
    for (const auto& f : a) {
      if (f.kind() != CoefficientField::Kind::GaussianBump) continue;
      const double c = f.vec()[d], w = f.width();
      for (int k = -6; k <= 6; ++k) br.push_back(c + 0.5 * w * k);
      for (double s = 6.0 * w; s < 2.0 * R; s *= 2.0) {
        br.push_back(c + s);
        br.push_back(c - s);
      }
    }
    std::sort(br.begin(), br.end());
    std::vector<double> kept;
    for (double b : br)
      if (b >= -R && b <= R && (kept.empty() || b - kept.back() > 1e-12 * R)) kept.push_back(b);
    for (std::size_t p = 0; p + 1 < kept.size(); ++p)
      for (int i = 0; i < panel_points; ++i) {
        double x, w;
        gsl_integration_glfixed_point(kept[p], kept[p + 1], i, &x, &w, table);
        nodes[d].push_back(x);
        weights[d].push_back(w);
      }
  }
  gsl_integration_glfixed_table_free(table);

  // Bump factors are separable: G = prod_d exp(-(x_d - x0_d)^2 / w^2).
  struct AxisData {
    std::array<std::vector<double>, 3> g, dlog;  // per-axis factor and d/dx_d log G
  };
  std::array<AxisData, 3> ax;
  for (int l = 0; l < 3; ++l) {
    if (a[l].kind() != CoefficientField::Kind::GaussianBump) continue;
    const double w2 = a[l].width() * a[l].width();
    for (int d = 0; d < 3; ++d)
      for (double x : nodes[d]) {
        const double y = x - a[l].vec()[d];
        ax[l].g[d].push_back(std::exp(-y * y / w2));
        ax[l].dlog[d].push_back(-2.0 * y / w2);
      }
  }
  const int n0 = static_cast<int>(nodes[0].size());
  const std::size_t n1 = nodes[1].size(), n2 = nodes[2].size();
  const auto slabs = parallel_map<std::array<double, 9>>(n0, [&](int i) {
    std::array<double, 9> acc{};
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t k = 0; k < n2; ++k) {
        const double w = weights[0][i] * weights[1][j] * weights[2][k];
        const std::array<std::size_t, 3> id{static_cast<std::size_t>(i), j, k};
        std::array<double, 3> val;
        std::array<std::array<double, 3>, 3> grad{};
        for (int l = 0; l < 3; ++l) {
          val[l] = a[l].c();
          if (a[l].kind() != CoefficientField::Kind::GaussianBump) continue;
          const double bump = a[l].eps() * ax[l].g[0][id[0]] * ax[l].g[1][id[1]] * ax[l].g[2][id[2]];
          val[l] += bump;
          for (int d = 0; d < 3; ++d) grad[l][d] = bump * ax[l].dlog[d][id[d]];
        }
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) {
            const double t = std::abs(val[p] * grad[q][p]);
            acc[3 * p + q] += w * t * t * t;
          }
      }
    return acc;
  });
  std::array<double, 9> total{};
  for (const auto& s : slabs)
    for (int c = 0; c < 9; ++c) total[c] += s[c];
  double M = 0.0;
  for (double t : total) M += std::cbrt(t);
  return M;
}

ConditionReport check_unbounded_conditions(const Coefficients& a, const UnboundedOptions& opt) {
  ConditionReport r;
  r.theorem = "unbounded";
  double C_T = std::numeric_limits<double>::infinity();
  for (const auto& f : a) {
    if (!f.has_decay_certificate())
      throw Error(ErrorKind::Precondition, "coefficient kind lacks a decay certificate: " + f.kind_name());
    // values range over the hull of c and c + eps (the bump tends to 0 at infinity)
    const double lo = std::min(f.c(), f.c() + f.eps()), hi = std::max(f.c(), f.c() + f.eps());
    const double inf_sq = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
    C_T = std::min(C_T, f.kind() == CoefficientField::Kind::Constant ? f.c() * f.c() : inf_sq);
  }

  std::vector<double> seq{unbounded_m_constant(a, opt.half_width, opt.panel_points)};
  double R = opt.half_width;
  bool stable = opt.doublings == 0;
  for (int k = 0; k < opt.doublings; ++k) {
    R *= 2.0;
    seq.push_back(unbounded_m_constant(a, R, opt.panel_points));
    const double prev = seq[seq.size() - 2], cur = seq.back();
    if (std::abs(cur - prev) <= opt.stable_tol * std::max(std::abs(cur), 1e-300) || cur == prev) {
      stable = true;
      break;
    }
  }
  const double M = seq.back();
  r.rows.push_back(make_row("C_T > 0", C_T, 0.0));
  r.rows.push_back(make_row("C_T - 4 M > 0", C_T, 4.0 * M));
  r.values = {{"C_T", C_T}, {"M", M}, {"half_width", R}};
  for (std::size_t k = 0; k < seq.size(); ++k) r.values.emplace_back("M_R" + std::to_string(k), seq[k]);
  r.flags.emplace_back("M_finite", std::isfinite(M));
  r.flags.emplace_back("truncation_stable", stable);
  if (!stable) r.notes.push_back("M did not stabilize under truncation doubling");
  return r;
}

}  // namespace sspec
