#include "sspec/slicefn.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/Polynomials>

namespace sspec {

namespace {

cplx poly_value(const std::vector<double>& c, cplx z) {
  cplx r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + *it;
  return r;
}

cplx poly_derivative(const std::vector<double>& c, cplx z) {
  cplx r = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) r = r * z + static_cast<double>(k) * c[k];
  return r;
}

cplx ipow(cplx z, int m) {
  cplx r = 1.0;
  for (int k = 0; k < m; ++k) r *= z;
  return r;
}

bool is_real(const Quaternion& q) { return q.x == 0.0 && q.y == 0.0 && q.z == 0.0; }

}  // namespace

HoloFn HoloFn::power(int m) {
  if (m < 0) throw Error(ErrorKind::Domain, "monomial degree must be nonnegative");
  HoloFn g;
  g.kind_ = Kind::Power;
  g.m_ = m;
  return g;
}

HoloFn HoloFn::exp() {
  HoloFn g;
  g.kind_ = Kind::Exp;
  return g;
}

HoloFn HoloFn::sin() {
  HoloFn g;
  g.kind_ = Kind::Sin;
  return g;
}

HoloFn HoloFn::cos() {
  HoloFn g;
  g.kind_ = Kind::Cos;
  return g;
}

HoloFn HoloFn::frac_pow(double alpha) {
  HoloFn g;
  g.kind_ = Kind::FracPow;
  g.alpha_ = alpha;
  return g;
}

HoloFn HoloFn::rational(std::vector<double> num, std::vector<double> den) {
  if (den.empty() || std::all_of(den.begin(), den.end(), [](double c) { return c == 0.0; }))
    throw Error(ErrorKind::Domain, "rational function needs a nonzero denominator");
  HoloFn g;
  g.kind_ = Kind::Rational;
  g.num_ = std::move(num);
  g.den_ = std::move(den);
  return g;
}

HoloFn HoloFn::product(const HoloFn& a, const HoloFn& b) {
  HoloFn g;
  g.kind_ = Kind::Product;
  g.a_ = std::make_shared<const HoloFn>(a);
  g.b_ = std::make_shared<const HoloFn>(b);
  return g;
}

HoloFn HoloFn::custom(std::function<cplx(cplx)> g, std::function<cplx(cplx)> dg) {
  HoloFn h;
  h.kind_ = Kind::Custom;
  h.g_ = std::move(g);
  h.dg_ = std::move(dg);
  return h;
}

bool HoloFn::in_domain(cplx z) const {
  switch (kind_) {
    case Kind::FracPow:
      return !(z.imag() == 0.0 && z.real() <= 0.0);
    case Kind::Rational:
      return std::abs(poly_value(den_, z)) > 1e-300;
    case Kind::Product:
      return a_->in_domain(z) && b_->in_domain(z);
    default:
      return true;
  }
}

bool HoloFn::holomorphic_on_disc(double c, double r) const {
  switch (kind_) {
    case Kind::FracPow:
      return c - r > 0.0;
    case Kind::Rational: {
      std::size_t deg = den_.size();
      while (deg > 0 && den_[deg - 1] == 0.0) --deg;
      if (deg <= 1) return true;
      Eigen::VectorXd coeffs(deg);
      for (std::size_t k = 0; k < deg; ++k) coeffs[k] = den_[k];
      Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
      for (const auto& root : solver.roots())
        if (std::abs(root - cplx(c, 0.0)) <= r) return false;
      return true;
    }
    case Kind::Product:
      return a_->holomorphic_on_disc(c, r) && b_->holomorphic_on_disc(c, r);
    default:
      return true;
  }
}

cplx HoloFn::value(cplx z) const {
  if (!in_domain(z)) throw Error(ErrorKind::Domain, "holomorphic function evaluated outside its domain");
  switch (kind_) {
    case Kind::Power:
      return ipow(z, m_);
    case Kind::Exp:
      return std::exp(z);
    case Kind::Sin:
      return std::sin(z);
    case Kind::Cos:
      return std::cos(z);
    case Kind::FracPow:
      return std::pow(z, alpha_);
    case Kind::Rational:
      return poly_value(num_, z) / poly_value(den_, z);
    case Kind::Product:
      return a_->value(z) * b_->value(z);
    case Kind::Custom:
      return g_(z);
  }
  return 0.0;
}

cplx HoloFn::derivative(cplx z) const {
  if (!in_domain(z)) throw Error(ErrorKind::Domain, "holomorphic function evaluated outside its domain");
  switch (kind_) {
    case Kind::Power:
      return m_ == 0 ? cplx(0.0) : static_cast<double>(m_) * ipow(z, m_ - 1);
    case Kind::Exp:
      return std::exp(z);
    case Kind::Sin:
      return std::cos(z);
    case Kind::Cos:
      return -std::sin(z);
    case Kind::FracPow:
      return alpha_ * std::pow(z, alpha_ - 1.0);
    case Kind::Rational: {
      const cplx p = poly_value(num_, z), q = poly_value(den_, z);
      return (poly_derivative(num_, z) * q - p * poly_derivative(den_, z)) / (q * q);
    }
    case Kind::Product:
      return a_->derivative(z) * b_->value(z) + a_->value(z) * b_->derivative(z);
    case Kind::Custom:
      return dg_(z);
  }
  return 0.0;
}

SliceFunction::SliceFunction(std::string kind, std::vector<Term> terms)
    : kind_(std::move(kind)), terms_(std::move(terms)) {}

SliceFunction SliceFunction::constant(const Quaternion& c) { return {"monomial", {{HoloFn::power(0), c}}}; }

SliceFunction SliceFunction::monomial(int m, const Quaternion& coeff) {
  return {"monomial", {{HoloFn::power(m), coeff}}};
}

SliceFunction SliceFunction::polynomial(std::vector<Quaternion> coeffs) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (coeffs[k].norm2() != 0.0) terms.push_back({HoloFn::power(static_cast<int>(k)), coeffs[k]});
  return {"polynomial", std::move(terms)};
}

SliceFunction SliceFunction::exp(const Quaternion& coeff) { return {"exp", {{HoloFn::exp(), coeff}}}; }
SliceFunction SliceFunction::sin(const Quaternion& coeff) { return {"sin", {{HoloFn::sin(), coeff}}}; }
SliceFunction SliceFunction::cos(const Quaternion& coeff) { return {"cos", {{HoloFn::cos(), coeff}}}; }

SliceFunction SliceFunction::power(double alpha) {
  return {"power", {{HoloFn::frac_pow(alpha), Quaternion(1.0)}}};
}

SliceFunction SliceFunction::rational(std::vector<double> num, std::vector<double> den) {
  return {"rational", {{HoloFn::rational(std::move(num), std::move(den)), Quaternion(1.0)}}};
}

SliceFunction SliceFunction::left_cauchy_kernel(const Quaternion& s) {
  // -(x^2 - 2 s0 x + |s|^2)^{-1} x + (x^2 - 2 s0 x + |s|^2)^{-1} conj(s)
  std::vector<double> den = {s.norm2(), -2.0 * s.w, 1.0};
  return {"cauchy_kernel",
          {{HoloFn::rational({0.0, 1.0}, den), Quaternion(-1.0)}, {HoloFn::rational({1.0}, den), s.conj()}}};
}

bool SliceFunction::intrinsic() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return is_real(t.coeff); });
}

bool SliceFunction::in_domain(double u, double v) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.g.in_domain(cplx(u, v)); });
}

bool SliceFunction::holomorphic_on_disc(double c, double r) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.g.holomorphic_on_disc(c, r); });
}

SliceParts SliceFunction::parts(double u, double v) const {
  if (!in_domain(u, v)) throw Error(ErrorKind::Domain, "slice function evaluated outside its domain");
  SliceParts p;
  for (const auto& t : terms_) {
    const cplx g = t.g.value(cplx(u, v));
    const cplx dg = t.g.derivative(cplx(u, v));
    p.f0 += t.coeff * g.real();
    p.f1 += t.coeff * g.imag();
    // d/du g = g', d/dv g = i g'
    p.du_f0 += t.coeff * dg.real();
    p.du_f1 += t.coeff * dg.imag();
    p.dv_f0 += t.coeff * (-dg.imag());
    p.dv_f1 += t.coeff * dg.real();
  }
  return p;
}

SliceFunction operator+(const SliceFunction& f, const SliceFunction& g) {
  auto terms = f.terms_;
  terms.insert(terms.end(), g.terms_.begin(), g.terms_.end());
  return {"sum", std::move(terms)};
}

SliceFunction SliceFunction::star(const SliceFunction& f, const SliceFunction& g) {
  std::vector<Term> terms;
  for (const auto& a : f.terms_)
    for (const auto& b : g.terms_) terms.push_back({HoloFn::product(a.g, b.g), a.coeff * b.coeff});
  return {"product", std::move(terms)};
}

SliceFunction SliceFunction::scaled(double a) const {
  auto terms = terms_;
  for (auto& t : terms) t.coeff *= a;
  return {kind_, std::move(terms)};
}

Quaternion eval(const SliceFunction& f, const Quaternion& x) {
  const auto p = paravector_decompose(x);
  const Quaternion j = p.j ? p.j->as_quaternion() : Quaternion::e1();
  return f.eval_slice(p.u, p.v, j, x);
}

Multivector eval(const SliceFunction& f, const Multivector& x) {
  const auto p = paravector_decompose(x);
  // at real points f1 vanishes, so any unit gives the same value
  const Multivector j = p.j ? p.j->as_multivector() : Multivector::basis(x.dim(), 1);
  return f.eval_slice(p.u, p.v, j, x);
}

Contour::Contour(ImaginaryUnit i, double c, double r, int n) : plane(std::move(i)), center(c), radius(r), nodes(n) {
  if (!(r > 0.0)) throw Error(ErrorKind::Precondition, "contour radius must be positive");
  if (n < 8) throw Error(ErrorKind::Precondition, "contour needs at least 8 nodes");
}

cplx Contour::node(int k) const {
  const double theta = 2.0 * std::numbers::pi * k / nodes;
  return {center + radius * std::cos(theta), radius * std::sin(theta)};
}

double sphere_distance(double ux, double vx, double us, double vs) {
  return std::hypot(ux - us, std::abs(vx) - std::abs(vs));
}

Quaternion niven_solution(const Quaternion& s, const Quaternion& q) {
  if (sphere_distance(q.w, q.im_norm(), s.w, s.im_norm()) < kSingularGuard * (1.0 + s.norm()))
    throw Error(ErrorKind::SingularSphere, "niven: q lies on [s]");
  const Quaternion d = q - s.conj();
  return d.inv() * s * d - q;
}

double niven_residual(const Quaternion& s, const Quaternion& q) {
  const Quaternion S = niven_solution(s, q);
  return (S * S + S * q - s * S).norm();
}

Quaternion representation_formula(const SliceFunction& f, double u, double v, const ImaginaryUnit& i,
                                  const ImaginaryUnit& j) {
  return representation_formula(f, u, v, i.as_quaternion(), j.as_quaternion());
}

void check_contour_encloses(const Contour& ct, double u, double v) {
  const double d = std::hypot(u - ct.center, v);
  if (std::abs(d - ct.radius) < kSingularGuard * (1.0 + ct.radius))
    throw Error(ErrorKind::SingularSphere, "sphere of the evaluation point touches the contour");
  if (d > ct.radius) throw Error(ErrorKind::Precondition, "contour does not enclose the evaluation sphere");
}

namespace {

template <class A>
A cauchy_integral_impl(const SliceFunction& f, const A& x, const Contour& ct, const A& i_unit) {
  check_contour_encloses(ct, x.re(), x.im_norm());
  if (!f.holomorphic_on_disc(ct.center, ct.radius))
    throw Error(ErrorKind::Domain, "function is not holomorphic on the contour disc");
  A sum = scalar_like(x, 0.0);
  for (int k = 0; k < ct.nodes; ++k) {
    const cplx z = ct.node(k);
    const A s = scalar_like(x, z.real()) + i_unit * z.imag();
    // ds_I = -I ds = -I (I (s - c) dtheta) = (s - c) dtheta
    const A ds = scalar_like(x, z.real() - ct.center) + i_unit * z.imag();
    sum += cauchy_kernel_left(s, x) * ds * f.eval_slice(z.real(), z.imag(), i_unit, x);
  }
  return sum * (1.0 / ct.nodes);
}

template <class A>
double g_residual_impl(const SliceFunction& f, const A& x, const A& omega, const std::vector<A>& basis) {
  const double r = x.im_norm();
  if (r == 0.0) throw Error(ErrorKind::Domain, "G operator degenerates on the real axis");
  const SliceParts p = f.parts(x.re(), r);
  auto lift = [&](const Quaternion& q) { return coefficient_like(x, q); };
  const A im = x - scalar_like(x, x.re());
  const A d0 = lift(p.du_f0) + omega * lift(p.du_f1);
  const A dr = lift(p.dv_f0) + omega * lift(p.dv_f1);
  A euler = scalar_like(x, 0.0);
  for (const auto& e : basis) {
    const double xj = -(e * im).re();
    // d/dx_j of f0(x0, r) + w f1(x0, r) with dw/dx_j = (e_j - w x_j / r) / r
    const A dw = (e - omega * (xj / r)) * (1.0 / r);
    euler += (dr * (xj / r) + dw * lift(p.f1)) * xj;
  }
  const A g = d0 * (r * r) + im * euler;
  return g.norm();
}

}  // namespace

Quaternion cauchy_integral(const SliceFunction& f, const Quaternion& x, const Contour& ct) {
  return cauchy_integral_impl(f, x, ct, ct.plane.as_quaternion());
}

Multivector cauchy_integral(const SliceFunction& f, const Multivector& x, const Contour& ct) {
  if (ct.plane.dim() != x.dim()) throw Error(ErrorKind::DimensionMismatch, "contour plane dimension mismatch");
  return cauchy_integral_impl(f, x, ct, ct.plane.as_multivector());
}

double g_residual(const SliceFunction& f, const Multivector& x) {
  const auto p = paravector_decompose(x);
  if (!p.j) throw Error(ErrorKind::Domain, "G operator degenerates on the real axis");
  std::vector<Multivector> basis;
  for (int j = 1; j <= x.dim(); ++j) basis.push_back(Multivector::basis(x.dim(), j));
  return g_residual_impl(f, x, p.j->as_multivector(), basis);
}

double g_residual(const SliceFunction& f, const Quaternion& x) {
  const auto p = paravector_decompose(x);
  if (!p.j) throw Error(ErrorKind::Domain, "G operator degenerates on the real axis");
  return g_residual_impl(f, x, p.j->as_quaternion(), {Quaternion::e1(), Quaternion::e2(), Quaternion::e3()});
}

double cr_residual(const SliceFunction& f, double u, double v) {
  const SliceParts p = f.parts(u, v);
  return std::max((p.du_f0 - p.dv_f1).norm(), (p.dv_f0 + p.du_f1).norm());
}

}  // namespace sspec
