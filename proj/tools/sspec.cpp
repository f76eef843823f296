// sspec: S-spectrum, functional calculi and fractional powers from the command line.
//
// Exit codes: 0 ok, 1 verify failure, 2 parse/usage, 3 solver, 4 non-enclosing
// contour or unmet precondition, 5 non-intrinsic function with --check-eigen,
// 6 assembly budget exceeded.

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "io.hpp"
#include "sspec/conditions.hpp"
#include "sspec/error.hpp"
#include "sspec/fueter.hpp"
#include "verify.hpp"

using namespace sspec;
using io::Json;

namespace {

struct ExitCode {
  int code;
  std::string message;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::DimensionMismatch: return 2;
    case ErrorKind::Solver:
    case ErrorKind::SingularSphere: return 3;
    case ErrorKind::Precondition:
    case ErrorKind::Domain: return 4;
    case ErrorKind::Budget: return 6;
  }
  return 3;
}

ImaginaryUnit parse_plane(const std::vector<double>& dir) {
  if (dir.size() != 3) throw Error(ErrorKind::Parse, "--plane needs 3 components");
  return ImaginaryUnit(dir);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Right eigenpairs T v = v lambda read off the complex adjoint; only pairs whose
// residual confirms them are kept.
std::vector<std::pair<std::vector<Quaternion>, Quaternion>> right_eigenpairs(const QMatrix& T) {
  const int m = T.rows();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(complex_adjoint(T));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "eigenvalue solver failed");
  std::vector<std::pair<std::vector<Quaternion>, Quaternion>> out;
  for (int k = 0; k < 2 * m; ++k) {
    const auto lam = es.eigenvalues()(k);
    if (lam.imag() < 0.0) continue;
    const Eigen::VectorXcd z = es.eigenvectors().col(k);
    std::vector<Quaternion> v(m);
    double vn = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto b = -std::conj(z(i + m));
      v[i] = Quaternion(z(i).real(), z(i).imag(), b.real(), b.imag());
      vn += v[i].norm2();
    }
    const Quaternion l(lam.real(), lam.imag());
    double res = 0.0;
    for (int i = 0; i < m; ++i) {
      Quaternion s(0.0);
      for (int j = 0; j < m; ++j) s = s + T(i, j) * v[j];
      res += (s - v[i] * l).norm2();
    }
    if (std::sqrt(res) <= 1e-8 * (T.norm() + l.norm()) * std::sqrt(vn)) out.emplace_back(v, l);
  }
  return out;
}

int cmd_spectrum(const std::string& path, const std::optional<std::string>& out, int grid) {
  const QMatrix T = io::matrix_from_json(io::read_json(path));
  const SphereSet s = s_spectrum(T);
  const SpectrumScan scan = scan_s_spectrum(T, grid);
  Json j{{"spheres", io::spheres_to_json(s)},
         {"scan",
          {{"consistent", scan.consistent},
           {"minima", scan.minima.size()},
           {"min_off_spectrum", scan.min_off_spectrum}}}};
  io::write_text(out, dump(j));
  return 0;
}

struct CalcOptions {
  std::string matrix, function, calculus = "s";
  int nodes = 0;
  std::vector<double> plane{1.0, 0.0, 0.0};
  std::optional<double> center, radius;
  int sphere_nodes = 24;
  bool check_eigen = false;
  std::optional<std::string> out;
};

Contour calc_contour(const SphereSet& spectrum, const CalcOptions& o, int nodes) {
  const ImaginaryUnit plane = parse_plane(o.plane);
  Contour ct = default_contour(spectrum, plane, nodes);
  if (o.center) ct.center = *o.center;
  if (o.radius) ct.radius = *o.radius;
  return Contour(plane, ct.center, ct.radius, nodes);
}

int cmd_calc(const CalcOptions& o) {
  const QMatrix T = io::matrix_from_json(io::read_json(o.matrix));
  const SliceFunction f = io::function_from_json(io::read_json(o.function));
  if (o.check_eigen && o.calculus != "s")
    throw Error(ErrorKind::Parse, "--check-eigen applies to the S-functional calculus");
  if (o.check_eigen && !f.intrinsic()) {
    std::cerr << "error: function is not intrinsic; the eigen relation f(T)v = v f(lambda) does not apply\n";
    return 5;
  }

  if (o.calculus == "s") {
    QMatrix fT;
    if (o.nodes == 0 && !o.center && !o.radius) {
      fT = s_functional_calculus_auto(T, f, parse_plane(o.plane)).value;
    } else {
      fT = s_functional_calculus(T, f, calc_contour(s_spectrum(T), o, o.nodes > 0 ? o.nodes : 256));
    }
    if (o.check_eigen) {
      const auto pairs = right_eigenpairs(T);
      double worst = 0.0;
      for (const auto& [v, lam] : pairs) worst = std::max(worst, eigen_relation_residual(fT, v, lam, f));
      const double bound = 1e-8 * std::max(1.0, fT.norm());
      const Json rep{{"eigen_check",
                      {{"pairs", pairs.size()}, {"max_residual", worst}, {"bound", bound}, {"pass", worst <= bound}}}};
      std::cerr << rep.dump() << "\n";
    }
    io::write_text(o.out, dump(io::matrix_to_json(fT)));
    return 0;
  }

  const ParavectorOpTuple A = ParavectorOpTuple::from_qmatrix(T);
  if (!A.commuting) throw Error(ErrorKind::Precondition, "commuting components required");
  if (o.calculus == "f") {
    const MvMatrix r = f_functional_calculus(A, f, calc_contour(commutative_s_spectrum(A), o, o.nodes > 0 ? o.nodes : 256));
    io::write_text(o.out, dump(io::mv_matrix_to_json(r)));
    return 0;
  }
  if (o.calculus == "monogenic") {
    double bound = 0.0;
    for (int j = 1; j <= A.n(); ++j) bound += std::pow(A.t[j].operatorNorm(), 2);
    const double R = o.radius.value_or(1.25 * std::sqrt(bound) + 1e-3);
    const Contour fc(parse_plane(o.plane), 0.0, 1.5 * R, 96);
    auto fcheck = [&](const Multivector& x) { return fueter_integral(f, x, fc); };
    const MvMatrix r = monogenic_functional_calculus(A, fcheck, SphereQuadrature{R, o.sphere_nodes});
    io::write_text(o.out, dump(io::mv_matrix_to_json(r)));
    return 0;
  }
  throw Error(ErrorKind::Parse, "--calculus must be s, f or monogenic");
}

Json dirichlet_json(const io::FieldConfig& cfg) {
  try {
    return io::report_to_json(check_dirichlet_conditions(cfg.a, cfg.box));
  } catch (const Error& e) {
    return Json{{"theorem", "dirichlet"}, {"pass", false}, {"error", e.what()}};
  }
}

struct FracOptions {
  std::string config, vector = "random:1", form = "left";
  double alpha = 0.5;
  std::vector<double> plane{1.0, 0.0, 0.0};
  int points = 10;
  bool check_only = false;
  std::optional<std::string> out, report;
};

void emit_report(const std::optional<std::string>& path, const Json& j) {
  if (path)
    io::write_text(path, dump(j));
  else
    std::cerr << dump(j);
}

int cmd_fracpow(const FracOptions& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) {
    std::cerr << "error: alpha in (0,1) required\n";
    return 2;
  }
  if (o.form != "left" && o.form != "right") throw Error(ErrorKind::Parse, "--form must be left or right");
  const io::FieldConfig cfg = io::field_config_from_json(io::read_json(o.config));
  const Json conditions = dirichlet_json(cfg);
  if (!conditions["pass"].get<bool>())
    std::cerr << "warning: sufficient conditions for convergence are not met; computing anyway\n";
  if (o.check_only) {
    io::write_text(o.report ? o.report : o.out, dump(conditions));
    return 0;
  }

  const GridOperator T = discretize(cfg.a, cfg.box);
  const Eigen::VectorXd v = lift_real(io::grid_vector(o.vector, cfg.box));
  QuadratureSpec q;
  q.alpha = o.alpha;
  q.points = o.points;
  q.plane = parse_plane(o.plane);
  const PowerForm form = o.form == "left" ? PowerForm::Left : PowerForm::Right;
  const FracPowResult r = frac_power_apply(T, v, q, form);
  QuadratureSpec other = q;
  other.plane = ImaginaryUnit({0.3, -0.8, 0.5});
  const Eigen::MatrixXd alt = frac_power_apply(T, v, other, form).value;
  const double scale = std::max(r.value.norm(), 1e-300);

  Json rep{{"alpha", o.alpha},
           {"form", o.form},
           {"conditions", conditions},
           {"quadrature",
            {{"nodes_per_branch", r.nodes}, {"points_per_panel", q.points}, {"t_lo", r.t_lo}, {"t_hi", r.t_hi}}},
           {"plane_independence_residual", (alt - r.value).norm() / scale}};
  if (T.constant_coefficients() && T.scalar_square())
    rep["oracle_agreement"] = (commuting_oracle(T, v, o.alpha) - r.value).norm() / scale;
  emit_report(o.report, rep);
  io::write_text(o.out, io::field_csv(cfg.box, r.value.col(0)));
  return 0;
}

struct HeatOptions {
  std::string config, init = "mode:0";
  std::vector<double> alpha{1.0};
  double dt = 1e-3;
  int steps = 10;
  std::optional<std::string> out, summary;
};

std::string suffixed(const std::string& path, double alpha) {
  std::ostringstream tag;
  tag << "_alpha" << alpha;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag.str();
  return path.substr(0, dot) + tag.str() + path.substr(dot);
}

int cmd_heat(const HeatOptions& o) {
  if (o.alpha.size() > 1 && !o.out) throw Error(ErrorKind::Parse, "several --alpha values need -o");
  if (o.steps < 0 || !(o.dt > 0.0)) throw Error(ErrorKind::Parse, "--steps >= 0 and --dt > 0 required");
  const io::FieldConfig cfg = io::field_config_from_json(io::read_json(o.config));
  const Eigen::VectorXd f0 = io::grid_vector(o.init, cfg.box);
  Json runs = Json::array();
  for (double a : o.alpha) {
    if (!(a > 0.0 && a <= 1.0)) {
      std::cerr << "error: alpha in (0,1] required\n";
      return 2;
    }
    const HeatTrajectory tr = heat_step(cfg.box, cfg.a, a, f0, o.dt, o.steps);
    const std::optional<std::string> path = o.out ? std::optional(o.alpha.size() > 1 ? suffixed(*o.out, a) : *o.out)
                                                  : std::nullopt;
    io::write_text(path, io::trajectory_csv(cfg.box, tr));
    Json run{{"alpha", a}, {"dt", o.dt}, {"steps", o.steps}, {"times", tr.times}, {"l2", tr.l2}};
    if (path) run["trajectory"] = *path;
    if (o.steps > 0 && tr.l2.front() > 0.0 && tr.l2.back() > 0.0)
      run["mean_decay_rate"] = -std::log(tr.l2.back() / tr.l2.front()) / tr.times.back();
    runs.push_back(run);
  }
  emit_report(o.summary, Json{{"runs", runs}});
  return 0;
}

int cmd_check(const std::string& config, const std::string& theorem, const std::optional<std::string>& out) {
  const io::FieldConfig cfg = io::field_config_from_json(io::read_json(config));
  Json reports = Json::array();
  const bool all = theorem == "all";
  if (!all && theorem != "dirichlet" && theorem != "robin" && theorem != "unbounded")
    throw Error(ErrorKind::Parse, "--theorem must be dirichlet, robin, unbounded or all");
  auto guarded = [&](const std::string& name, auto&& fn) {
    if (!all && theorem != name) return;
    try {
      reports.push_back(io::report_to_json(fn()));
    } catch (const Error& e) {
      if (!all) throw;
      reports.push_back(Json{{"theorem", name}, {"pass", false}, {"error", e.what()}});
    }
  };
  guarded("dirichlet", [&] { return check_dirichlet_conditions(cfg.a, cfg.box); });
  guarded("robin", [&] { return check_robin_conditions(cfg.a, cfg.robin, cfg.box); });
  guarded("unbounded", [&] { return check_unbounded_conditions(cfg.a, cfg.unbounded); });
  io::write_text(out, dump(Json{{"reports", reports}}));
  return 0;
}

int cmd_verify(const std::string& suite) {
  const auto rows = verify::run_suite(suite);
  std::vector<std::string> failing;
  for (const auto& r : rows) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(34) << (r.suite + "/" + r.name)
              << std::right << std::scientific << std::setprecision(3) << std::setw(11) << r.measured
              << (r.at_least ? "  >= " : "  <= ") << std::setw(9) << r.bound << "\n";
    if (!r.pass) failing.push_back(r.suite + "/" + r.name);
  }
  for (const auto& f : failing) std::cerr << "failing invariant: " << f << "\n";
  return failing.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S-spectrum, quaternionic functional calculi and fractional powers of vector operators"};
  app.require_subcommand(1);
  app.footer("SSPEC_THREADS caps worker threads. Exit codes: 1 verify failure, 2 parse, 3 solver, "
             "4 non-enclosing/noncommuting/precondition, 5 non-intrinsic with --check-eigen, 6 budget.");

  std::optional<std::string> out;
  int grid = 81;
  std::string spectrum_path;
  auto* spectrum = app.add_subcommand("spectrum", "S-spectrum of a quaternionic matrix with a scan cross-check");
  spectrum->add_option("matrix", spectrum_path, "matrix JSON {m, entries}")->required()->check(CLI::ExistingFile);
  spectrum->add_option("-o,--output", out, "output path (default stdout)");
  spectrum->add_option("--grid", grid, "scan grid points per axis")->capture_default_str();

  CalcOptions co;
  auto* calc = app.add_subcommand("calc", "functional calculus f(T)");
  calc->add_option("matrix", co.matrix, "matrix JSON")->required()->check(CLI::ExistingFile);
  calc->add_option("function", co.function, "function JSON {kind, params, coefficients}")
      ->required()
      ->check(CLI::ExistingFile);
  calc->add_option("--calculus", co.calculus, "s | f | monogenic")
      ->check(CLI::IsMember({"s", "f", "monogenic"}))
      ->capture_default_str();
  calc->add_option("--nodes", co.nodes, "contour nodes (0: adaptive doubling)")->capture_default_str();
  calc->add_option("--plane", co.plane, "imaginary unit of the contour plane")->expected(3);
  calc->add_option("--center", co.center, "contour centre");
  calc->add_option("--radius", co.radius, "contour radius (sphere radius for monogenic)");
  calc->add_option("--sphere-nodes", co.sphere_nodes, "quadrature nodes per angle (monogenic)")->capture_default_str();
  calc->add_flag("--check-eigen", co.check_eigen, "check f(T)v = v f(lambda) on right eigenpairs");
  calc->add_option("-o,--output", co.out, "output path (default stdout)");

  FracOptions fo;
  auto* frac = app.add_subcommand("fracpow", "fractional power P_alpha(T_h) v on a box grid");
  frac->add_option("config", fo.config, "coefficient-field config JSON")->required()->check(CLI::ExistingFile);
  frac->add_option("--alpha", fo.alpha, "power in (0,1)")->capture_default_str();
  frac->add_option("--vector", fo.vector, "ones | random:SEED | mode:K | mode:top")->capture_default_str();
  frac->add_option("--form", fo.form, "left | right")->capture_default_str();
  frac->add_option("--plane", fo.plane, "imaginary unit of the integration line")->expected(3);
  frac->add_option("--points", fo.points, "Gauss-Legendre points per panel")->capture_default_str();
  frac->add_flag("--check-only", fo.check_only, "only evaluate the convergence conditions");
  frac->add_option("-o,--output", fo.out, "field CSV path (default stdout)");
  frac->add_option("--report", fo.report, "report JSON path (default stderr)");

  HeatOptions ho;
  auto* heat = app.add_subcommand("heat", "implicit Euler for the fractional heat equation");
  heat->add_option("config", ho.config, "coefficient-field config JSON")->required()->check(CLI::ExistingFile);
  heat->add_option("--alpha", ho.alpha, "power(s) in (0,1]")->capture_default_str();
  heat->add_option("--dt", ho.dt, "time step")->capture_default_str();
  heat->add_option("--steps", ho.steps, "number of steps")->capture_default_str();
  heat->add_option("--init", ho.init, "initial field: ones | random:SEED | mode:K | mode:top")->capture_default_str();
  heat->add_option("-o,--output", ho.out, "trajectory CSV path (default stdout)");
  heat->add_option("--summary", ho.summary, "summary JSON path (default stderr)");

  std::string check_path, theorem = "all";
  auto* check = app.add_subcommand("check", "sufficient conditions for the fractional powers");
  check->add_option("config", check_path, "coefficient-field config JSON")->required()->check(CLI::ExistingFile);
  check->add_option("--theorem", theorem, "dirichlet | robin | unbounded | all")->capture_default_str();
  check->add_option("-o,--output", out, "output path (default stdout)");

  std::string suite = "all";
  auto* ver = app.add_subcommand("verify", "run an invariant suite and print a pass/fail table");
  ver->add_option("suite", suite, "kernels | calculus | fracpow | all")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*spectrum) return cmd_spectrum(spectrum_path, out, grid);
    if (*calc) return cmd_calc(co);
    if (*frac) return cmd_fracpow(fo);
    if (*heat) return cmd_heat(ho);
    if (*check) return cmd_check(check_path, theorem, out);
    if (*ver) return cmd_verify(suite);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
