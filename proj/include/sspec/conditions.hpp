#pragma once

// Sufficient conditions for absolute convergence of the fractional-power
// integrals: Dirichlet box, Robin box and truncated unbounded domains.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sspec/fracpow.hpp"

namespace sspec {

// lhs > rhs is required; margin = lhs - rhs.
struct ConditionRow {
  std::string inequality;
  double lhs = 0.0, rhs = 0.0, margin = 0.0;
  bool pass = false;
};

struct ConditionReport {
  std::string theorem;  // "dirichlet" | "robin" | "unbounded"
  std::vector<ConditionRow> rows;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, bool>> flags;
  std::vector<std::string> notes;

  bool pass() const;
  double value(const std::string& name) const;
  bool flag(const std::string& name) const;
};

// Poincare constants of the box [0, L1] x [0, L2] x [0, L3].
double dirichlet_poincare(const std::array<double, 3>& L);
double neumann_poincare(const std::array<double, 3>& L);

// Extremum of f over the closed box lo <= x <= hi (lo[d] == hi[d] pins a
// coordinate): dense sampling followed by Nelder-Mead refinement.
double box_sup(const std::function<double(const std::array<double, 3>&)>& f, const std::array<double, 3>& lo,
               const std::array<double, 3>& hi, int samples = 21);
double box_inf(const std::function<double(const std::array<double, 3>&)>& f, const std::array<double, 3>& lo,
               const std::array<double, 3>& hi, int samples = 21);

ConditionReport check_dirichlet_conditions(const Coefficients& a, const BoxGrid& g);

struct RobinData {
  CoefficientField a_bdry = CoefficientField::constant(0.0);  // a in the T-generated boundary form
  std::optional<CoefficientField> b;                          // b in the flux boundary form, enables the row check
  std::optional<double> trace_constant;                       // C_{dOmega}
  bool estimate_trace = true;
};

// sqrt of the largest Rayleigh quotient |u|^2_{L2(dOmega)} / |u|^2_{H1(Omega)} over
// trilinear elements with `cells` cells per direction.
double estimate_trace_constant(const std::array<double, 3>& L, int cells = 8);

ConditionReport check_robin_conditions(const Coefficients& a, const RobinData& data, const BoxGrid& g);

struct UnboundedOptions {
  double half_width = 4.0;  // truncation box [-R, R]^3
  int doublings = 4;        // truncation study length
  double stable_tol = 1e-3;
  int panel_points = 10;
};

// sum_{i,j} |a_i d_i a_j|_{L3} over [-R, R]^3.
double unbounded_m_constant(const Coefficients& a, double half_width, int panel_points = 10);

ConditionReport check_unbounded_conditions(const Coefficients& a, const UnboundedOptions& opt = {});

}  // namespace sspec
