#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sspec/error.hpp"
#include "sspec/fracpow.hpp"

namespace sspec {

CoefficientField CoefficientField::constant(double c) {
  CoefficientField f;
  f.kind_ = Kind::Constant;
  f.c_ = c;
  return f;
}

CoefficientField CoefficientField::affine(double c, std::array<double, 3> g) {
  CoefficientField f;
  f.kind_ = Kind::Affine;
  f.c_ = c;
  f.g_ = g;
  return f;
}

CoefficientField CoefficientField::trigonometric(double c, double eps, int k, std::vector<int> dirs,
                                                 std::array<double, 3> L) {
  if (dirs.empty()) throw Error(ErrorKind::Precondition, "trigonometric perturbation needs at least one direction");
  for (int d : dirs)
    if (d < 1 || d > 3) throw Error(ErrorKind::Precondition, "perturbation directions must lie in {1, 2, 3}");
  for (double l : L)
    if (!(l > 0.0)) throw Error(ErrorKind::Precondition, "box lengths must be positive");
  CoefficientField f;
  f.kind_ = Kind::Trigonometric;
  f.c_ = c;
  f.eps_ = eps;
  f.k_ = k;
  f.dirs_ = std::move(dirs);
  f.g_ = L;
  return f;
}

CoefficientField CoefficientField::gaussian_bump(double c, double eps, double width, std::array<double, 3> x0) {
  if (!(width > 0.0)) throw Error(ErrorKind::Precondition, "bump width must be positive");
  CoefficientField f;
  f.kind_ = Kind::GaussianBump;
  f.c_ = c;
  f.eps_ = eps;
  f.width_ = width;
  f.g_ = x0;
  return f;
}

std::string CoefficientField::kind_name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::Affine: return "affine";
    case Kind::Trigonometric: return "trigonometric-perturbation";
    case Kind::GaussianBump: return "gaussian-bump";
  }
  return "unknown";
}

double CoefficientField::value(const std::array<double, 3>& x) const {
  switch (kind_) {
    case Kind::Constant: return c_;
    case Kind::Affine: return c_ + g_[0] * x[0] + g_[1] * x[1] + g_[2] * x[2];
    case Kind::Trigonometric: {
      double p = 1.0;
      for (int d : dirs_) p *= std::sin(k_ * std::numbers::pi * x[d - 1] / g_[d - 1]);
      return c_ + eps_ * p;
    }
    case Kind::GaussianBump: {
      double r2 = 0.0;
      for (int d = 0; d < 3; ++d) r2 += (x[d] - g_[d]) * (x[d] - g_[d]);
      return c_ + eps_ * std::exp(-r2 / (width_ * width_));
    }
  }
  return c_;
}

std::array<double, 3> CoefficientField::gradient(const std::array<double, 3>& x) const {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  switch (kind_) {
    case Kind::Constant: break;
    case Kind::Affine: g = g_; break;
    case Kind::Trigonometric:
      for (int m : dirs_) {
        const double w = k_ * std::numbers::pi / g_[m - 1];
        double p = eps_ * w * std::cos(w * x[m - 1]);
        for (int d : dirs_)
          if (d != m) p *= std::sin(k_ * std::numbers::pi * x[d - 1] / g_[d - 1]);
        g[m - 1] = p;
      }
      break;
    case Kind::GaussianBump: {
      const double G = value(x) - c_;
      for (int d = 0; d < 3; ++d) g[d] = -2.0 * (x[d] - g_[d]) / (width_ * width_) * G;
      break;
    }
  }
  return g;
}

bool CoefficientField::is_constant() const {
  switch (kind_) {
    case Kind::Constant: return true;
    case Kind::Affine: return g_[0] == 0.0 && g_[1] == 0.0 && g_[2] == 0.0;
    default: return eps_ == 0.0;
  }
}

BoxGrid::BoxGrid(std::array<double, 3> lengths, std::array<int, 3> counts) : L(lengths), N(counts) {
  for (int l = 0; l < 3; ++l) {
    if (!(L[l] > 0.0)) throw Error(ErrorKind::Precondition, "box lengths must be positive");
    if (N[l] < 2) throw Error(ErrorKind::Precondition, "each direction needs at least 2 interior nodes");
  }
}

std::array<int, 3> BoxGrid::multi_index(int p) const { return {p % N[0], (p / N[0]) % N[1], p / (N[0] * N[1])}; }

std::array<double, 3> BoxGrid::point(int p) const {
  const auto m = multi_index(p);
  return {(m[0] + 1) * h(0), (m[1] + 1) * h(1), (m[2] + 1) * h(2)};
}

Eigen::SparseMatrix<double> BoxGrid::difference(int l) const {
  const int n = nodes();
  const double w = 0.5 / h(l);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * n);
  for (int p = 0; p < n; ++p) {
    auto m = multi_index(p);
    const int i = m[l];
    if (i + 1 < N[l]) {
      m[l] = i + 1;
      trip.emplace_back(p, index(m[0], m[1], m[2]), w);
    }
    if (i > 0) {
      m[l] = i - 1;
      trip.emplace_back(p, index(m[0], m[1], m[2]), -w);
    }
  }
  Eigen::SparseMatrix<double> D(n, n);
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

Eigen::Matrix4d left_mult_matrix(const Quaternion& q) {
  Eigen::Matrix4d M;
  const Quaternion basis[4] = {Quaternion(1.0), Quaternion::e1(), Quaternion::e2(), Quaternion::e3()};
  for (int c = 0; c < 4; ++c) {
    const Quaternion r = q * basis[c];
    M.col(c) << r.w, r.x, r.y, r.z;
  }
  return M;
}

namespace {

// kron(A, B) for a sparse n x n A and dense 4 x 4 B in the 4 p + c layout.
void append_kron(std::vector<Eigen::Triplet<double>>& trip, const Eigen::SparseMatrix<double>& A,
                 const Eigen::Matrix4d& B) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          if (B(r, c) != 0.0) trip.emplace_back(4 * it.row() + r, 4 * it.col() + c, it.value() * B(r, c));
}

std::optional<Eigen::SparseMatrix<double>> extract_scalar(const Eigen::SparseMatrix<double>& M) {
  const Eigen::Index n = M.rows() / 4;
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
      if (it.row() % 4 == 0 && it.col() % 4 == 0) trip.emplace_back(it.row() / 4, it.col() / 4, it.value());
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  std::vector<Eigen::Triplet<double>> ktrip;
  append_kron(ktrip, S, Eigen::Matrix4d::Identity());
  Eigen::SparseMatrix<double> K(M.rows(), M.cols());
  K.setFromTriplets(ktrip.begin(), ktrip.end());
  const double scale = std::max(1.0, M.norm());
  if ((M - K).norm() > 1e-13 * scale) return std::nullopt;
  return S;
}

}  // namespace

GridOperator::GridOperator(Eigen::SparseMatrix<double> real_form, std::optional<BoxGrid> grid,
                           bool constant_coefficients)
    : t_(std::move(real_form)), grid_(std::move(grid)), constant_(constant_coefficients) {
  if (t_.rows() != t_.cols() || t_.rows() % 4 != 0 || t_.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "operator real form must be square with 4 components per node");
  t2_ = (t_ * t_).pruned();
  s2_ = extract_scalar(t2_);
}

GridOperator GridOperator::from_qmatrix(const QMatrix& T) {
  if (!T.square()) throw Error(ErrorKind::DimensionMismatch, "square matrix required");
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < T.rows(); ++i)
    for (int j = 0; j < T.cols(); ++j) {
      const Eigen::Matrix4d B = left_mult_matrix(T(i, j));
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          if (B(r, c) != 0.0) trip.emplace_back(4 * i + r, 4 * j + c, B(r, c));
    }
  Eigen::SparseMatrix<double> M(4 * T.rows(), 4 * T.cols());
  M.setFromTriplets(trip.begin(), trip.end());
  return GridOperator(std::move(M), std::nullopt, false);
}

GridOperator GridOperator::negated() const {
  GridOperator g = *this;
  g.t_ = -t_;
  return g;
}

GridOperator discretize(const Coefficients& a, const BoxGrid& g) {
  for (int l = 0; l < 3; ++l)
    if (g.N[l] < 2) throw Error(ErrorKind::Precondition, "each direction needs at least 2 interior nodes");
  const int n = g.nodes();
  const Quaternion units[3] = {Quaternion::e1(), Quaternion::e2(), Quaternion::e3()};
  std::vector<Eigen::Triplet<double>> trip;
  bool constant = true;
  for (int l = 0; l < 3; ++l) {
    constant = constant && a[l].is_constant();
    Eigen::VectorXd coef(n);
    for (int p = 0; p < n; ++p) coef(p) = a[l].value(g.point(p));
    const Eigen::SparseMatrix<double> A = coef.asDiagonal() * g.difference(l);
    append_kron(trip, A, left_mult_matrix(units[l]));
  }
  Eigen::SparseMatrix<double> M(4 * n, 4 * n);
  M.setFromTriplets(trip.begin(), trip.end());
  return GridOperator(std::move(M), g, constant);
}

Eigen::MatrixXd left_mul(const Quaternion& q, const Eigen::MatrixXd& v) {
  if (v.rows() % 4) throw Error(ErrorKind::DimensionMismatch, "H-valued fields need 4 rows per node");
  const Eigen::Matrix4d L = left_mult_matrix(q);
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (Eigen::Index p = 0; p < v.rows() / 4; ++p) out.middleRows<4>(4 * p).noalias() = L * v.middleRows<4>(4 * p);
  return out;
}

Eigen::MatrixXd lift_real(const Eigen::MatrixXd& v) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(4 * v.rows(), v.cols());
  for (Eigen::Index p = 0; p < v.rows(); ++p) out.row(4 * p) = v.row(p);
  return out;
}

Eigen::MatrixXd component(const Eigen::MatrixXd& v, int c) {
  if (v.rows() % 4 || c < 0 || c > 3) throw Error(ErrorKind::DimensionMismatch, "invalid component request");
  Eigen::MatrixXd out(v.rows() / 4, v.cols());
  for (Eigen::Index p = 0; p < out.rows(); ++p) out.row(p) = v.row(4 * p + c);
  return out;
}

Eigen::MatrixXd div_h(const BoxGrid& g, const Eigen::MatrixXd& w) {
  if (w.rows() != g.dof()) throw Error(ErrorKind::DimensionMismatch, "field does not match the grid");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.nodes(), w.cols());
  for (int l = 0; l < 3; ++l) out += g.difference(l) * component(w, l + 1);
  return out;
}

namespace {

// (4n x m) <-> (n x 4m) with column block c holding component c.
Eigen::MatrixXd to_scalar_layout(const Eigen::MatrixXd& F) {
  const Eigen::Index n = F.rows() / 4, m = F.cols();
  Eigen::MatrixXd S(n, 4 * m);
  for (int c = 0; c < 4; ++c) S.middleCols(c * m, m) = component(F, c);
  return S;
}

Eigen::MatrixXd from_scalar_layout(const Eigen::MatrixXd& S, Eigen::Index m) {
  const Eigen::Index n = S.rows();
  Eigen::MatrixXd F(4 * n, m);
  for (int c = 0; c < 4; ++c)
    for (Eigen::Index p = 0; p < n; ++p) F.row(4 * p + c) = S.block(p, c * m, 1, m);
  return F;
}

}  // namespace

QsFactor::QsFactor(const GridOperator& T, double t2, double tol) : T_(&T), t2_(t2), tol_(tol) {
  scalar_ = T.scalar_square().has_value();
  Eigen::SparseMatrix<double> Q = scalar_ ? *T.scalar_square() : T.squared();
  Eigen::SparseMatrix<double> I(Q.rows(), Q.cols());
  I.setIdentity();
  Q += t2 * I;
  Q.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(Q);
  if (lu_->info() != Eigen::Success) throw Error(ErrorKind::SingularSphere, "Q_s(T) is singular");
}

Eigen::MatrixXd QsFactor::solve(const Eigen::MatrixXd& F) const {
  if (F.rows() != T_->dof()) throw Error(ErrorKind::DimensionMismatch, "right-hand side does not match the operator");
  Eigen::MatrixXd u;
  if (scalar_) {
    u = from_scalar_layout(lu_->solve(to_scalar_layout(F)), F.cols());
  } else {
    u = lu_->solve(F);
  }
  if (lu_->info() != Eigen::Success) throw Error(ErrorKind::Solver, "sparse solve failed");
  const Eigen::MatrixXd r = T_->apply_squared(u) + t2_ * u - F;
  const double fn = F.norm();
  residual_ = fn > 0.0 ? r.norm() / fn : r.norm();
  if (!(residual_ <= tol_))
    throw Error(ErrorKind::Solver, "Q_s solve residual " + std::to_string(residual_) + " above tolerance");
  return u;
}

Eigen::MatrixXd QsFactor::solve_transpose(const Eigen::MatrixXd& F) const {
  if (F.rows() != T_->dof()) throw Error(ErrorKind::DimensionMismatch, "right-hand side does not match the operator");
  if (scalar_) return from_scalar_layout(lu_->transpose().solve(to_scalar_layout(F)), F.cols());
  return lu_->transpose().solve(F);
}

Eigen::VectorXd qs_solve(const GridOperator& Th, const Quaternion& s, const Eigen::VectorXd& F, double tol) {
  const double r = s.norm();
  if (r == 0.0) throw Error(ErrorKind::Precondition, "s = 0 is excluded from the integration path");
  if (std::abs(s.w) > 1e-14 * r) throw Error(ErrorKind::Precondition, "s must be purely imaginary");
  return QsFactor(Th, r * r, tol).solve(F);
}

double ResolventProbe::running_sup_ratio() const {
  if (scaled.empty()) return 0.0;
  std::vector<std::size_t> order(scaled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return modulus[a] > modulus[b]; });
  double sup = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (auto i : order) {
    sup = std::max(sup, scaled[i]);
    lo = std::min(lo, sup);
    hi = std::max(hi, sup);
  }
  return hi / lo;
}

double ResolventProbe::raw_ratio() const {
  if (scaled.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  return *hi / *lo;
}

std::vector<Quaternion> imaginary_sweep(const ImaginaryUnit& I, double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw Error(ErrorKind::Precondition, "invalid sweep range");
  std::vector<Quaternion> out;
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
    out.push_back(I.as_quaternion() * t);
  }
  return out;
}

ResolventProbe resolvent_bound_probe(const GridOperator& Th, const std::vector<Quaternion>& samples) {
  ResolventProbe out;
  const Eigen::SparseMatrix<double> Tt = Th.real_form().transpose();
  for (const Quaternion& s : samples) {
    const double r = s.norm();
    if (r == 0.0 || std::abs(s.w) > 1e-14 * r) throw Error(ErrorKind::Precondition, "samples must be nonzero and purely imaginary");
    QsFactor Q(Th, r * r, 1e-8);
    // S_L^{-1} x = -Q^{-1}(T - conj(s)) x and its transpose
    auto A = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return -Q.solve(Th.apply(x) - left_mul(s.conj(), x));
    };
    auto At = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      const Eigen::VectorXd y = Q.solve_transpose(x);
      return -(Tt * y - left_mul(s, y));
    };
    double best = 0.0;
    for (unsigned seed : {11u, 29u}) {
      std::mt19937 rng(seed);
      std::normal_distribution<double> d;
      Eigen::VectorXd x(Th.dof());
      for (auto& e : x) e = d(rng);
      x.normalize();
      double lambda = 0.0;
      for (int it = 0; it < 60; ++it) {
        const Eigen::VectorXd y = At(A(x));
        lambda = y.norm();
        if (lambda == 0.0) break;
        x = y / lambda;
      }
      best = std::max(best, std::sqrt(lambda));
    }
    out.modulus.push_back(r);
    out.scaled.push_back(r * best);
    out.theta = std::max(out.theta, r * best);
  }
  return out;
}

}  // namespace sspec
