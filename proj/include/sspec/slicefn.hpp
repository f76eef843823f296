#pragma once

// Slice hyperholomorphic functions f(u + J v) = f0(u, v) + J f1(u, v), the two
// forms of the slice Cauchy kernel, the slice Cauchy integral on circles, and
// residual checks (Cauchy-Riemann, global operator G, Niven equation).
//
// Orientation convention: on a contour in the plane C_I we use ds_I = -I ds,
// which is the same as ds / I because I^{-1} = -I.

#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "sspec/hypercomplex.hpp"

namespace sspec {

using cplx = std::complex<double>;

// Holomorphic function of one complex variable that is real on the real axis,
// g(conj z) = conj g(z). Its restriction to any slice gives an intrinsic slice
// function. A closed family with exact derivatives.
class HoloFn {
 public:
  enum class Kind { Power, Exp, Sin, Cos, FracPow, Rational, Product, Custom };

  static HoloFn power(int m);
  static HoloFn exp();
  static HoloFn sin();
  static HoloFn cos();
  static HoloFn frac_pow(double alpha);
  // num and den hold real coefficients in ascending order.
  static HoloFn rational(std::vector<double> num, std::vector<double> den);
  static HoloFn product(const HoloFn& a, const HoloFn& b);
  // Caller-supplied g and g'; must satisfy g(conj z) = conj g(z).
  static HoloFn custom(std::function<cplx(cplx)> g, std::function<cplx(cplx)> dg);

  Kind kind() const { return kind_; }
  int exponent() const { return m_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }
  const HoloFn& left() const { return *a_; }
  const HoloFn& right() const { return *b_; }

  // Throws ErrorKind::Domain outside the holomorphy domain.
  cplx value(cplx z) const;
  cplx derivative(cplx z) const;
  bool in_domain(cplx z) const;
  // Holomorphic on the closed disc |z - c| <= r (custom kinds are trusted).
  bool holomorphic_on_disc(double c, double r) const;

 private:
  Kind kind_ = Kind::Power;
  int m_ = 0;
  double alpha_ = 0.0;
  std::vector<double> num_, den_;
  std::shared_ptr<const HoloFn> a_, b_;
  std::function<cplx(cplx)> g_, dg_;
};

// Components of f at (u, v), valued in the coefficient algebra (quaternions),
// together with exact first partials.
struct SliceParts {
  Quaternion f0, f1;
  Quaternion du_f0, dv_f0, du_f1, dv_f1;
};

// f(x) = sum_k g_k(x) c_k with g_k intrinsic and c_k right coefficients. Right
// coefficients are quaternions; on R_n paravectors they act through the
// embedding H -> R_n (i -> e1, j -> e2, k -> e1 e2).
class SliceFunction {
 public:
  struct Term {
    HoloFn g;
    Quaternion coeff;
  };

  SliceFunction() = default;
  SliceFunction(std::string kind, std::vector<Term> terms);

  static SliceFunction constant(const Quaternion& c);
  static SliceFunction monomial(int m, const Quaternion& coeff = Quaternion(1.0));
  static SliceFunction polynomial(std::vector<Quaternion> coeffs);  // ascending degree
  static SliceFunction exp(const Quaternion& coeff = Quaternion(1.0));
  static SliceFunction sin(const Quaternion& coeff = Quaternion(1.0));
  static SliceFunction cos(const Quaternion& coeff = Quaternion(1.0));
  static SliceFunction power(double alpha);
  static SliceFunction rational(std::vector<double> num, std::vector<double> den);
  // x -> S_L^{-1}(s, x) as a left slice function of x.
  static SliceFunction left_cauchy_kernel(const Quaternion& s);

  const std::string& kind() const { return kind_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool intrinsic() const;

  SliceParts parts(double u, double v) const;
  bool in_domain(double u, double v) const;
  bool holomorphic_on_disc(double c, double r) const;

  // Sum and slice product (f*g)(x) = sum g_k(x) h_l(x) c_k d_l. When f is
  // intrinsic the slice product is the pointwise product.
  friend SliceFunction operator+(const SliceFunction& f, const SliceFunction& g);
  static SliceFunction star(const SliceFunction& f, const SliceFunction& g);
  SliceFunction scaled(double a) const;

  // Value at u + J v for a given imaginary unit (v may be negative).
  template <class A>
  A eval_slice(double u, double v, const A& j_unit, const A& like) const;

 private:
  std::string kind_ = "sum";
  std::vector<Term> terms_;
};

// f(x) via the (u, v, J) decomposition of x.
Quaternion eval(const SliceFunction& f, const Quaternion& x);
Multivector eval(const SliceFunction& f, const Multivector& x);

template <class A>
A SliceFunction::eval_slice(double u, double v, const A& j_unit, const A& like) const {
  if (!in_domain(u, v)) throw Error(ErrorKind::Domain, "slice function evaluated outside its domain");
  A out = scalar_like(like, 0.0);
  for (const auto& t : terms_) {
    const cplx g = t.g.value(cplx(u, v));
    out += (scalar_like(like, g.real()) + j_unit * g.imag()) * coefficient_like(like, t.coeff);
  }
  return out;
}

// Circle in the plane C_I centred on the real axis.
struct Contour {
  ImaginaryUnit plane;
  double center = 0.0;
  double radius = 1.0;
  int nodes = 64;

  Contour(ImaginaryUnit i, double c, double r, int n);
  // k-th node c + r e^{I theta_k} as (real, imaginary coordinate in C_I).
  cplx node(int k) const;
};

inline constexpr double kSingularGuard = 1e-10;

// Distance in the (u, v) half plane between [x] and [s].
double sphere_distance(double ux, double vx, double us, double vs);

namespace detail {

template <class A>
void guard_sphere(const A& s, const A& x) {
  const double d = sphere_distance(x.re(), x.im_norm(), s.re(), s.im_norm());
  if (d < kSingularGuard * (1.0 + s.norm()))
    throw Error(ErrorKind::SingularSphere, "point lies on the singular sphere [s]");
}

template <class A>
void require_para(const A&) {}

inline void require_para(const Multivector& m) {
  if (!m.is_paravector(1e-12)) throw Error(ErrorKind::Domain, "kernel arguments must be paravectors");
}

}  // namespace detail

// -(x^2 - 2 Re(s) x + |s|^2)^{-1} (x - conj(s))
template <class A>
A cauchy_kernel_left(const A& s, const A& x) {
  detail::require_para(s);
  detail::require_para(x);
  detail::guard_sphere(s, x);
  const A q = x * x - x * (2.0 * s.re()) + scalar_like(x, s.norm2());
  return -(q.inv() * (x - s.conj()));
}

// (s - conj(x)) (s^2 - 2 Re(x) s + |x|^2)^{-1}
template <class A>
A cauchy_kernel_right_form(const A& s, const A& x) {
  detail::require_para(s);
  detail::require_para(x);
  detail::guard_sphere(s, x);
  const A q = s * s - s * (2.0 * x.re()) + scalar_like(s, x.norm2());
  return (s - x.conj()) * q.inv();
}

// sum_{m=0}^{terms} x^m s^{-1-m}
template <class A>
A kernel_series(const A& s, const A& x, int terms) {
  if (x.norm() >= s.norm()) throw Error(ErrorKind::Domain, "kernel_series diverges for |x| >= |s|");
  const A sinv = s.inv();
  A xm = one_like(x);
  A sp = sinv;
  A sum = scalar_like(x, 0.0);
  for (int m = 0; m <= terms; ++m) {
    sum += xm * sp;
    xm = xm * x;
    sp = sp * sinv;
  }
  return sum;
}

// |S^2 + S q - s S| with S = (q - conj(s))^{-1} s (q - conj(s)) - q.
double niven_residual(const Quaternion& s, const Quaternion& q);
Quaternion niven_solution(const Quaternion& s, const Quaternion& q);

// 1/2 [f(u+Jv) + f(u-Jv)] + I 1/2 [J (f(u-Jv) - f(u+Jv))]
template <class A>
A representation_formula(const SliceFunction& f, double u, double v, const A& i_unit, const A& j_unit) {
  const A plus = f.eval_slice(u, v, j_unit, i_unit);
  const A minus = f.eval_slice(u, -v, j_unit, i_unit);
  return (plus + minus) * 0.5 + i_unit * (j_unit * (minus - plus)) * 0.5;
}
Quaternion representation_formula(const SliceFunction& f, double u, double v, const ImaginaryUnit& i,
                                  const ImaginaryUnit& j);

// (1/2 pi) \oint S_L^{-1}(s, x) ds_I f(s), trapezoidal rule on ct.
Quaternion cauchy_integral(const SliceFunction& f, const Quaternion& x, const Contour& ct);
Multivector cauchy_integral(const SliceFunction& f, const Multivector& x, const Contour& ct);

// Throws unless both points u +- I v of the sphere of x lie strictly inside the
// disc of ct and the disc lies in the domain of f.
void check_contour_encloses(const Contour& ct, double u, double v);

// |(|x|^2 d/dx0 + x sum_j x_j d/dx_j) f| using exact partials.
double g_residual(const SliceFunction& f, const Multivector& x);
double g_residual(const SliceFunction& f, const Quaternion& x);

// max(|du f0 - dv f1|, |dv f0 + du f1|)
double cr_residual(const SliceFunction& f, double u, double v);

}  // namespace sspec
