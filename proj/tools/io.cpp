#include "io.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "sspec/error.hpp"

namespace sspec::io {

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorKind::Parse, msg); }

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) parse_error(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) parse_error("unknown key '" + k + "' in " + where);
}

double number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) parse_error("missing '" + key + "' in " + where);
  if (!j.at(key).is_number()) parse_error("'" + key + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::array<double, 3> triple(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) parse_error(where + " must be an array of 3 numbers");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) parse_error(where + " must be an array of 3 numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

Quaternion quaternion(const Json& j) {
  if (!j.is_array() || j.size() != 4) parse_error("quaternion entries are [w, x, y, z]");
  for (const auto& c : j)
    if (!c.is_number()) parse_error("quaternion entries are [w, x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::vector<double> reals(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& c : j) {
    if (!c.is_number()) parse_error(where + " must be an array of numbers");
    out.push_back(c.get<double>());
  }
  return out;
}

}  // namespace

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_error(path + ": " + e.what());
  }
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + *path);
  out << text;
}

QMatrix matrix_from_json(const Json& j) {
  only_keys(j, {"m", "entries"}, "matrix");
  if (!j.contains("m") || !j["m"].is_number_integer() || j["m"].get<int>() < 1)
    parse_error("matrix needs a positive integer 'm'");
  const int m = j["m"].get<int>();
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].size() != static_cast<std::size_t>(m * m))
    parse_error("matrix needs m*m row-major 'entries'");
  QMatrix T(m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) T(r, c) = quaternion(j["entries"][r * m + c]);
  return T;
}

Json matrix_to_json(const QMatrix& T) {
  Json entries = Json::array();
  for (int r = 0; r < T.rows(); ++r)
    for (int c = 0; c < T.cols(); ++c) {
      const Quaternion& q = T(r, c);
      entries.push_back({q.w, q.x, q.y, q.z});
    }
  return Json{{"m", T.rows()}, {"entries", entries}};
}

Json mv_matrix_to_json(const MvMatrix& M) {
  Json entries = Json::array();
  const std::uint32_t blades = 1u << M.dim();
  for (int r = 0; r < M.size(); ++r)
    for (int c = 0; c < M.size(); ++c) {
      Json e = Json::array();
      for (std::uint32_t b = 0; b < blades; ++b) e.push_back(M[b](r, c));
      entries.push_back(e);
    }
  return Json{{"m", M.size()}, {"n", M.dim()}, {"entries", entries}};
}

SliceFunction function_from_json(const Json& j) {
  only_keys(j, {"kind", "params", "coefficients"}, "function");
  if (!j.contains("kind") || !j["kind"].is_string()) parse_error("function needs a string 'kind'");
  const std::string kind = j["kind"];
  const Json params = j.value("params", Json::object());
  std::vector<Quaternion> coeffs;
  if (j.contains("coefficients")) {
    if (!j["coefficients"].is_array()) parse_error("'coefficients' must be an array of quaternions");
    for (const auto& q : j["coefficients"]) coeffs.push_back(quaternion(q));
  }
  auto single = [&](Quaternion fallback) {
    if (coeffs.size() > 1) parse_error(kind + " takes at most one coefficient");
    return coeffs.empty() ? fallback : coeffs[0];
  };

  if (kind == "constant") {
    only_keys(params, {}, "constant params");
    return SliceFunction::constant(single(Quaternion(1.0)));
  }
  if (kind == "monomial") {
    only_keys(params, {"m"}, "monomial params");
    if (!params.contains("m") || !params["m"].is_number_integer() || params["m"].get<int>() < 0)
      parse_error("monomial needs a nonnegative integer 'm'");
    return SliceFunction::monomial(params["m"].get<int>(), single(Quaternion(1.0)));
  }
  if (kind == "polynomial") {
    only_keys(params, {}, "polynomial params");
    if (coeffs.empty()) parse_error("polynomial needs ascending 'coefficients'");
    return SliceFunction::polynomial(coeffs);
  }
  if (kind == "exp" || kind == "sin" || kind == "cos") {
    only_keys(params, {}, kind + " params");
    const Quaternion c = single(Quaternion(1.0));
    return kind == "exp" ? SliceFunction::exp(c) : kind == "sin" ? SliceFunction::sin(c) : SliceFunction::cos(c);
  }
  if (kind == "power") {
    only_keys(params, {"alpha"}, "power params");
    if (!coeffs.empty()) parse_error("power takes no coefficients");
    return SliceFunction::power(number(params, "alpha", "power params"));
  }
  if (kind == "rational") {
    only_keys(params, {"num", "den"}, "rational params");
    if (!coeffs.empty()) parse_error("rational takes no coefficients");
    if (!params.contains("num") || !params.contains("den")) parse_error("rational needs 'num' and 'den'");
    return SliceFunction::rational(reals(params["num"], "num"), reals(params["den"], "den"));
  }
  parse_error("unknown function kind '" + kind + "'");
}

Json spheres_to_json(const SphereSet& s) {
  Json out = Json::array();
  for (const auto& sp : s.spheres()) out.push_back({{"u", sp.u}, {"v", sp.v}});
  return out;
}

CoefficientField coefficient_from_json(const Json& j, const std::array<double, 3>& L) {
  only_keys(j, {"kind", "params"}, "coefficient field");
  if (!j.contains("kind") || !j["kind"].is_string()) parse_error("coefficient field needs a string 'kind'");
  const std::string kind = j["kind"];
  const Json p = j.value("params", Json::object());
  if (kind == "constant") {
    only_keys(p, {"c"}, "constant params");
    return CoefficientField::constant(number(p, "c", "constant params"));
  }
  if (kind == "affine") {
    only_keys(p, {"c", "g"}, "affine params");
    if (!p.contains("g")) parse_error("affine needs a slope 'g'");
    return CoefficientField::affine(number(p, "c", "affine params"), triple(p["g"], "g"));
  }
  if (kind == "trigonometric-perturbation") {
    only_keys(p, {"c", "eps", "k", "dirs"}, "trigonometric-perturbation params");
    std::vector<int> dirs{1};
    if (p.contains("dirs")) {
      dirs.clear();
      for (double d : reals(p["dirs"], "dirs")) dirs.push_back(static_cast<int>(d));
    }
    const int k = p.contains("k") ? static_cast<int>(number(p, "k", "trigonometric-perturbation params")) : 1;
    return CoefficientField::trigonometric(number(p, "c", "trigonometric-perturbation params"),
                                           number(p, "eps", "trigonometric-perturbation params"), k, dirs, L);
  }
  if (kind == "gaussian-bump") {
    only_keys(p, {"c", "eps", "width", "x0"}, "gaussian-bump params");
    const std::array<double, 3> x0 = p.contains("x0") ? triple(p["x0"], "x0") : std::array<double, 3>{0, 0, 0};
    return CoefficientField::gaussian_bump(number(p, "c", "gaussian-bump params"),
                                           number(p, "eps", "gaussian-bump params"),
                                           number_or(p, "width", 1.0, "gaussian-bump params"), x0);
  }
  parse_error("unknown coefficient kind '" + kind + "'");
}

FieldConfig field_config_from_json(const Json& j) {
  only_keys(j, {"kind", "params", "fields", "box", "robin", "unbounded"}, "config");
  FieldConfig cfg;
  if (!j.contains("box")) parse_error("config needs a 'box'");
  only_keys(j["box"], {"L", "N"}, "box");
  const auto L = j["box"].contains("L") ? triple(j["box"]["L"], "box.L") : std::array<double, 3>{1, 1, 1};
  const auto Nd = j["box"].contains("N") ? triple(j["box"]["N"], "box.N") : std::array<double, 3>{6, 6, 6};
  std::array<int, 3> N{};
  for (int i = 0; i < 3; ++i) {
    if (Nd[i] != std::floor(Nd[i])) parse_error("box.N must hold integers");
    N[i] = static_cast<int>(Nd[i]);
  }
  cfg.box = BoxGrid(L, N);

  if (j.contains("fields")) {
    if (j.contains("kind") || j.contains("params")) parse_error("give either 'fields' or a single 'kind'");
    if (!j["fields"].is_array() || j["fields"].size() != 3) parse_error("'fields' must hold 3 coefficient fields");
    for (int l = 0; l < 3; ++l) cfg.a[l] = coefficient_from_json(j["fields"][l], L);
  } else {
    Json single{{"kind", j.value("kind", std::string("constant"))}};
    if (j.contains("params")) single["params"] = j["params"];
    const CoefficientField f = coefficient_from_json(single, L);
    cfg.a = {f, f, f};
  }

  if (j.contains("robin")) {
    const Json& r = j["robin"];
    only_keys(r, {"a_bdry", "b", "trace_constant", "estimate_trace"}, "robin");
    cfg.has_robin = true;
    if (r.contains("a_bdry")) cfg.robin.a_bdry = coefficient_from_json(r["a_bdry"], L);
    if (r.contains("b")) cfg.robin.b = coefficient_from_json(r["b"], L);
    if (r.contains("trace_constant")) cfg.robin.trace_constant = number(r, "trace_constant", "robin");
    if (r.contains("estimate_trace")) {
      if (!r["estimate_trace"].is_boolean()) parse_error("robin.estimate_trace must be a boolean");
      cfg.robin.estimate_trace = r["estimate_trace"].get<bool>();
    }
  }
  if (j.contains("unbounded")) {
    const Json& u = j["unbounded"];
    only_keys(u, {"half_width", "doublings", "stable_tol"}, "unbounded");
    cfg.unbounded.half_width = number_or(u, "half_width", cfg.unbounded.half_width, "unbounded");
    cfg.unbounded.doublings = static_cast<int>(number_or(u, "doublings", cfg.unbounded.doublings, "unbounded"));
    cfg.unbounded.stable_tol = number_or(u, "stable_tol", cfg.unbounded.stable_tol, "unbounded");
  }
  return cfg;
}

Json report_to_json(const ConditionReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"inequality", row.inequality},
                    {"lhs", row.lhs},
                    {"rhs", row.rhs},
                    {"margin", row.margin},
                    {"pass", row.pass}});
  Json values = Json::object(), flags = Json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  for (const auto& [k, v] : r.flags) flags[k] = v;
  return Json{{"theorem", r.theorem}, {"pass", r.pass()}, {"rows", rows},
              {"values", values},    {"flags", flags},    {"notes", r.notes}};
}

Eigen::VectorXd grid_vector(const std::string& spec, const BoxGrid& g) {
  if (spec == "ones") return Eigen::VectorXd::Ones(g.nodes());
  if (spec.rfind("random", 0) == 0) {
    unsigned seed = 1;
    if (spec.size() > 6) {
      if (spec[6] != ':') parse_error("vector spec 'random:SEED' expected");
      seed = static_cast<unsigned>(std::stoul(spec.substr(7)));
    }
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXd v(g.nodes());
    for (auto& e : v) e = d(rng);
    return v;
  }
  if (spec.rfind("mode:", 0) == 0) {
    const Coefficients unit{CoefficientField::constant(1.0), CoefficientField::constant(1.0),
                            CoefficientField::constant(1.0)};
    const ScalarSpectrum sp = scalar_spectrum(discretize(unit, g));
    const std::string k = spec.substr(5);
    int idx = 0;
    if (k == "top") {
      idx = g.nodes() - 1;
    } else {
      try {
        idx = std::stoi(k);
      } catch (const std::exception&) {
        parse_error("vector spec 'mode:K' needs an integer K or 'top'");
      }
    }
    if (idx < 0 || idx >= g.nodes()) parse_error("mode index out of range");
    return sp.U.col(idx);
  }
  parse_error("unknown vector spec '" + spec + "' (ones | random:SEED | mode:K | mode:top)");
}

std::string field_csv(const BoxGrid& g, const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << std::setprecision(17) << "i,j,k,w,x,y,z\n";
  for (int p = 0; p < g.nodes(); ++p) {
    const auto m = g.multi_index(p);
    out << m[0] << ',' << m[1] << ',' << m[2];
    for (int c = 0; c < 4; ++c) out << ',' << v(4 * p + c);
    out << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const BoxGrid& g, const HeatTrajectory& tr) {
  std::ostringstream out;
  out << std::setprecision(17) << "step,t,i,j,k,v\n";
  for (std::size_t s = 0; s < tr.fields.size(); ++s)
    for (int p = 0; p < g.nodes(); ++p) {
      const auto m = g.multi_index(p);
      out << s << ',' << tr.times[s] << ',' << m[0] << ',' << m[1] << ',' << m[2] << ',' << tr.fields[s](p) << '\n';
    }
  return out.str();
}

}  // namespace sspec::io
