#pragma once

// Fractional powers of the quaternionic gradient operator with nonconstant
// coefficients T = sum_l e_l a_l(x) d/dx_l on box grids with Dirichlet ghosts.
//
// Grid functions are H-valued and stored as real vectors with four
// components per node (index 4 p + c, c = 0 real, 1..3 for e1..e3). Quaternion
// scalars act by left multiplication of the nodal values.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sspec/hypercomplex.hpp"
#include "sspec/qmatrix.hpp"

namespace sspec {

class CoefficientField {
 public:
  enum class Kind { Constant, Affine, Trigonometric, GaussianBump };

  static CoefficientField constant(double c);
  // c + g . x
  static CoefficientField affine(double c, std::array<double, 3> g);
  // c + eps prod_{d in dirs} sin(k pi x_d / L_d), dirs in {1, 2, 3}
  static CoefficientField trigonometric(double c, double eps, int k, std::vector<int> dirs,
                                        std::array<double, 3> L);
  // c + eps exp(-|x - x0|^2 / w^2); carries a decay certificate for unbounded domains.
  static CoefficientField gaussian_bump(double c, double eps, double width, std::array<double, 3> x0 = {0, 0, 0});

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  double value(const std::array<double, 3>& x) const;
  std::array<double, 3> gradient(const std::array<double, 3>& x) const;
  bool is_constant() const;
  bool has_decay_certificate() const { return kind_ == Kind::Constant || kind_ == Kind::GaussianBump; }

  double c() const { return c_; }
  double eps() const { return eps_; }
  double width() const { return width_; }
  int wave() const { return k_; }
  const std::vector<int>& dirs() const { return dirs_; }
  const std::array<double, 3>& vec() const { return g_; }  // slope, box lengths or centre by kind

 private:
  Kind kind_ = Kind::Constant;
  double c_ = 0.0, eps_ = 0.0, width_ = 1.0;
  int k_ = 1;
  std::vector<int> dirs_;
  std::array<double, 3> g_{};
};

using Coefficients = std::array<CoefficientField, 3>;

struct BoxGrid {
  std::array<double, 3> L{1.0, 1.0, 1.0};
  std::array<int, 3> N{6, 6, 6};

  BoxGrid() = default;
  BoxGrid(std::array<double, 3> lengths, std::array<int, 3> counts);

  double h(int l) const { return L[l] / (N[l] + 1); }
  int nodes() const { return N[0] * N[1] * N[2]; }
  int dof() const { return 4 * nodes(); }
  double cell_volume() const { return h(0) * h(1) * h(2); }
  int index(int i, int j, int k) const { return i + N[0] * (j + N[1] * k); }
  std::array<int, 3> multi_index(int p) const;
  std::array<double, 3> point(int p) const;
  // Central difference in direction l with zero Dirichlet ghosts (nodes x nodes).
  Eigen::SparseMatrix<double> difference(int l) const;
};

// 4 x 4 real matrix of v -> q v on H = R^4.
Eigen::Matrix4d left_mult_matrix(const Quaternion& q);

// Real-linear operator on H-valued nodal vectors, stored in real form.
class GridOperator {
 public:
  GridOperator() = default;
  GridOperator(Eigen::SparseMatrix<double> real_form, std::optional<BoxGrid> grid, bool constant_coefficients);
  // Real form of a quaternionic matrix acting by left matrix multiplication.
  static GridOperator from_qmatrix(const QMatrix& T);

  const Eigen::SparseMatrix<double>& real_form() const { return t_; }
  const Eigen::SparseMatrix<double>& squared() const { return t2_; }
  // T^2 as an n x n real matrix when every 4 x 4 block of T^2 is scalar.
  const std::optional<Eigen::SparseMatrix<double>>& scalar_square() const { return s2_; }
  const std::optional<BoxGrid>& grid() const { return grid_; }
  bool constant_coefficients() const { return constant_; }
  int nodes() const { return static_cast<int>(t_.rows() / 4); }
  int dof() const { return static_cast<int>(t_.rows()); }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& v) const { return t_ * v; }
  Eigen::MatrixXd apply_squared(const Eigen::MatrixXd& v) const { return t2_ * v; }
  GridOperator negated() const;

 private:
  Eigen::SparseMatrix<double> t_, t2_;
  std::optional<Eigen::SparseMatrix<double>> s2_;
  std::optional<BoxGrid> grid_;
  bool constant_ = false;
};

// (T_h v)(p) = sum_l e_l a_l(p) (D_l v)(p). Throws unless every N_i >= 2.
GridOperator discretize(const Coefficients& a, const BoxGrid& g);

// Left multiplication of every nodal value (all columns) by q.
Eigen::MatrixXd left_mul(const Quaternion& q, const Eigen::MatrixXd& v);
// Lifts real nodal values into the real component of H-valued fields.
Eigen::MatrixXd lift_real(const Eigen::MatrixXd& v);
// Component c of every node.
Eigen::MatrixXd component(const Eigen::MatrixXd& v, int c);
// sum_l D_l w_l with w_l the e_l component of an H-valued field.
Eigen::MatrixXd div_h(const BoxGrid& g, const Eigen::MatrixXd& w);

// Factorized Q_s(T) = T^2 + t^2 I for purely imaginary s with |s| = t; solves
// are checked against the requested relative residual.
class QsFactor {
 public:
  QsFactor(const GridOperator& T, double t2, double tol = 1e-10);
  Eigen::MatrixXd solve(const Eigen::MatrixXd& F) const;
  Eigen::MatrixXd solve_transpose(const Eigen::MatrixXd& F) const;
  double last_residual() const { return residual_; }

 private:
  const GridOperator* T_;
  double t2_, tol_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  bool scalar_ = false;
  mutable double residual_ = 0.0;
};

// Q_s(T_h) u = F for s with Re(s) = 0 and s != 0.
Eigen::VectorXd qs_solve(const GridOperator& Th, const Quaternion& s, const Eigen::VectorXd& F, double tol = 1e-10);

struct ResolventProbe {
  std::vector<double> modulus;  // |s| per sample
  std::vector<double> scaled;   // |s| ||S_L^{-1}(s, T)|| per sample
  double theta = 0.0;           // max of scaled
  // max over r of sup_{|s| >= r} scaled, divided by its min over r
  double running_sup_ratio() const;
  double raw_ratio() const;
};

// Operator 2-norms by power iteration on A^T A (60 iterations, two starts).
ResolventProbe resolvent_bound_probe(const GridOperator& Th, const std::vector<Quaternion>& samples);
// Purely imaginary samples s = t I with |t| log-spaced over [lo, hi].
std::vector<Quaternion> imaginary_sweep(const ImaginaryUnit& I, double lo, double hi, int count);

struct QuadratureSpec {
  ImaginaryUnit plane{std::vector<double>{1.0, 0.0, 0.0}};
  double alpha = 0.5;
  int points = 10;            // Gauss-Legendre points per panel in u = log t
  double panel_width = 1.0;   // in u
  double head_ratio = 0.1;    // t_lo = head_ratio / sqrt(rho(T^-2))
  double tail_ratio = 10.0;   // t_hi = tail_ratio * sqrt(rho(T^2))
  int series_terms = 8;       // head and tail expansions
  double solve_tol = 1e-10;
  bool verify = false;        // recompute with doubled points and compare
  double verify_tol = 1e-8;
};

enum class PowerForm { Left, Right };

struct FracPowResult {
  Eigen::MatrixXd value;
  int nodes = 0;  // quadrature nodes per branch
  double t_lo = 0.0, t_hi = 0.0;
  double verify_change = 0.0;
};

// P_alpha(T) v by quadrature of the left (or right) integral over -I R with
// t = +-e^u, plus the analytic head (t < t_lo) and tail (t > t_hi) series.
FracPowResult frac_power_apply(const GridOperator& Th, const Eigen::MatrixXd& v, const QuadratureSpec& q,
                               PowerForm form = PowerForm::Left);

// Scalar case T = [c], c real.
double frac_power_scalar(double c, const QuadratureSpec& q);

// Eigen-space reduction for constant coefficients: T^2 = O is symmetric and
// scalar; on each eigenspace the integral is a pair of 1D integrals in t.
Eigen::MatrixXd commuting_oracle(const GridOperator& Th, const Eigen::MatrixXd& v, double alpha);

// int_0^inf t^(alpha-1) / (mu + t^2) dt and int_0^inf t^alpha / (mu + t^2) dt by adaptive quadrature.
std::array<double, 2> oracle_moments(double mu, double alpha);

struct ConsistencyReport {
  Eigen::VectorXd lhs, rhs;
  double measured_constant = 0.0;
  double claimed_constant = 1.0;
  double relative_error = 0.0;      // |lhs - c rhs| / |c rhs|
  double eigen_spread = 0.0;        // max relative deviation of per-eigenvector ratios from c
};

// lhs = 2 div_h Vec(P_alpha(grad_h) v), rhs = O^{(1+alpha)/2} v with O = -div_h grad_h.
ConsistencyReport consistency_identity_check(const BoxGrid& g, double alpha, const Eigen::VectorXd& v,
                                             const QuadratureSpec& q = {});

// Dense eigendecomposition of the scalar operator O = T^2 for constant coefficients.
struct ScalarSpectrum {
  Eigen::VectorXd mu;
  Eigen::MatrixXd U;
};
ScalarSpectrum scalar_spectrum(const GridOperator& Th);

struct HeatTrajectory {
  std::vector<Eigen::VectorXd> fields;  // steps + 1 entries
  std::vector<double> times;
  std::vector<double> l2;               // sqrt(sum v^2 dV)
};

inline constexpr int kHeatNodeBudget = 12 * 12 * 12;

// M_alpha = 2 div_h Vec P_alpha(-T_h) assembled densely; alpha = 1 is the
// one-sided limit. Throws ErrorKind::Budget beyond kHeatNodeBudget nodes.
Eigen::MatrixXd heat_operator(const BoxGrid& g, const Coefficients& a, double alpha, const QuadratureSpec& q = {});

// Implicit Euler (I + dt M_alpha) v_{k+1} = v_k.
HeatTrajectory heat_step(const BoxGrid& g, const Coefficients& a, double alpha, const Eigen::VectorXd& f0,
                         double dt, int steps, const QuadratureSpec& q = {});

}  // namespace sspec
