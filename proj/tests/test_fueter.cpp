#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "sspec/fueter.hpp"

using namespace sspec;

namespace {

using Field = std::function<Multivector(const Multivector&)>;

Multivector para(int n, double x0, std::vector<double> v) {
  v.resize(n, 0.0);
  return Multivector::paravector(n, x0, v);
}

Multivector shift(const Multivector& x, int axis, double d) {
  Multivector y = x;
  y[axis == 0 ? 0u : (1u << (axis - 1))] += d;
  return y;
}

// Standard (2n+3)-point central-difference Laplacian in R^{n+1}.
Field fd_laplacian(Field g, double h) {
  return [g, h](const Multivector& x) {
    const Multivector c = g(x) * 2.0;
    Multivector sum(x.dim());
    for (int a = 0; a <= x.dim(); ++a) sum += g(shift(x, a, h)) + g(shift(x, a, -h)) - c;
    return sum * (1.0 / (h * h));
  };
}

Field fd_laplacian_power(Field g, double h, int power) {
  for (int k = 0; k < power; ++k) g = fd_laplacian(g, h);
  return g;
}

double rel(const Multivector& a, const Multivector& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(FueterConstants, Values) {
  EXPECT_EQ(constants(3, 1).C, -4.0);
  EXPECT_EQ(constants(3, 1).gamma, -4.0);
  EXPECT_NEAR(constants(3, 1).sigma, 2.0 * std::numbers::pi * std::numbers::pi, 1e-13);
  EXPECT_EQ(constants(5, 1).C, -8.0);
  EXPECT_EQ(constants(5, 2).C, 64.0);
  EXPECT_EQ(constants(5, 2).gamma, 64.0);
  EXPECT_EQ(constants(3, 2).C, 0.0);
  EXPECT_EQ(constants(5, 0).C, 1.0);
  EXPECT_NEAR(constants(5, 0).sigma, std::pow(std::numbers::pi, 3.0), 1e-12);
  EXPECT_NEAR(constants(1, 0).sigma, 2.0 * std::numbers::pi, 1e-14);
  for (int n : {1, 3, 5, 7}) EXPECT_EQ(constants(n, (n - 1) / 2).C, constants(n, 0).gamma);
  EXPECT_THROW(constants(4, 1), Error);
}

TEST(Tfs1, InducedFunctions) {
  const auto id = tfs1(HoloFn::power(1));
  const auto x = para(3, 0.3, {0.4, -0.2, 0.7});
  EXPECT_LT((eval(id, x) - x).norm(), 1e-15);
  EXPECT_LT((eval(tfs1(HoloFn::power(2)), x) - x * x).norm(), 1e-15);
  const auto e = tfs1(HoloFn::exp());
  const auto p = e.parts(0.5, 1.2), q = SliceFunction::exp().parts(0.5, 1.2);
  EXPECT_NEAR(p.f0.w, std::exp(0.5) * std::cos(1.2), 1e-15);
  EXPECT_NEAR(p.f1.w, std::exp(0.5) * std::sin(1.2), 1e-15);
  EXPECT_EQ(p.f0, q.f0);
  EXPECT_TRUE(e.intrinsic());
}

TEST(Tfs1, RejectsParityViolation) {
  const cplx i(0.0, 1.0);
  EXPECT_THROW(tfs1(HoloFn::custom([i](cplx z) { return i * z; }, [i](cplx) { return i; })), Error);
  EXPECT_NO_THROW(tfs1(HoloFn::custom([](cplx z) { return z * z * z; }, [](cplx z) { return 3.0 * z * z; })));
}

TEST(LaplacianKernel, ExtensionAtZero) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d;
  for (int k = 0; k < 100; ++k) {
    const auto s = para(3, d(rng), {d(rng), d(rng), d(rng)}), x = para(3, d(rng), {d(rng), d(rng), d(rng)});
    EXPECT_LT(rel(laplacian_power_kernel(s, x, 0), cauchy_kernel_right_form(s, x)), 1e-14);
  }
}

TEST(LaplacianKernel, MatchesFiniteDifferenceN3) {
  // [s] lies about 2.5 away from x in the (u, v) half plane
  const auto s = para(3, 1.5, {2.0, -0.5, 1.0});
  const auto x = para(3, -0.2, {0.3, 0.5, -0.1});
  const Field kern = [&](const Multivector& y) { return cauchy_kernel_left(s, y); };
  EXPECT_LT(rel(fd_laplacian(kern, 1e-3)(x), laplacian_power_kernel(s, x, 1)), 1e-6);
}

TEST(LaplacianKernel, RealSClosedForm) {
  const auto s = Multivector::scalar(3, 1.7);
  const auto x = para(3, 0.2, {0.3, 0.4, -0.5});
  const auto q = (s - x) * (s - x.conj());
  const auto expected = (s - x.conj()) * q.inv() * q.inv() * -4.0;
  EXPECT_LT(rel(laplacian_power_kernel(s, x, 1), expected), 1e-14);
}

TEST(LaplacianKernel, SecondOrderConvergence) {
  struct Case {
    int n, h;
  };
  for (const auto c : {Case{3, 1}, Case{5, 1}, Case{5, 2}}) {
    std::vector<double> sv = {1.1, -0.3, 0.6, 0.2, -0.4}, xv = {0.3, 0.5, -0.1, 0.2, 0.1};
    const auto s = para(c.n, 0.4, sv), x = para(c.n, -0.2, xv);
    const Field kern = [&](const Multivector& y) { return cauchy_kernel_left(s, y); };
    const auto exact = laplacian_power_kernel(s, x, c.h);
    const double e1 = rel(fd_laplacian_power(kern, 4e-2, c.h)(x), exact);
    const double e2 = rel(fd_laplacian_power(kern, 2e-2, c.h)(x), exact);
    EXPECT_GE(e1 / e2, 3.5) << c.n << "," << c.h;
    EXPECT_LT(e2, 1e-2) << c.n << "," << c.h;
  }
}

TEST(FKernel, EqualsLaplacianPowerAtSceExponent) {
  for (int n : {3, 5}) {
    const auto s = para(n, 0.1, {1.0, 0.5, -0.2, 0.3, 0.1});
    const auto x = para(n, 0.3, {-0.2, 0.1, 0.4, 0.0, 0.2});
    EXPECT_LT(rel(f_kernel(s, x), laplacian_power_kernel(s, x, (n - 1) / 2)), 1e-15);
  }
}

TEST(FKernel, MonogenicOnlyAtSceExponent) {
  const double h = 1e-2;
  for (int n : {3, 5}) {
    const auto s = para(n, 0.2, {1.3, -0.4, 0.5, 0.2, -0.3});
    const auto x = para(n, -0.1, {0.2, 0.3, -0.2, 0.1, 0.2});
    const Field fk = [&](const Multivector& y) { return f_kernel(s, y); };
    const double scale = f_kernel(s, x).norm() / h;
    EXPECT_LT(dirac_residual(sample_axial(fk, x, h, 3)), 1e-3 * scale) << n;
    // one power below the Sce exponent is not monogenic
    const int below = (n - 1) / 2 - 1;
    const Field other = [&](const Multivector& y) { return laplacian_power_kernel(s, y, below); };
    EXPECT_GT(dirac_residual(sample_axial(other, x, h, 3)), 1e-2 * other(x).norm()) << n;
    // the unnormalized shape one power above is not monogenic either
    const Field above = [&](const Multivector& y) { return kernel_shape(s, y, (n + 1) / 2); };
    EXPECT_GT(dirac_residual(sample_axial(above, x, h, 3)), 1e-2 * above(x).norm()) << n;
  }
}

TEST(MonogenicKernel, ValuesAndHomogeneity) {
  const auto one = Multivector::scalar(3, 1.0), zero = Multivector::scalar(3, 0.0);
  EXPECT_NEAR(monogenic_kernel(one, zero).re(), 1.0 / (2.0 * std::numbers::pi * std::numbers::pi), 1e-15);
  const auto w = para(3, 0.2, {0.1, -0.3, 0.4}), x = para(3, -0.5, {0.2, 0.2, 0.1});
  const auto d = w - x;
  for (double t : {0.5, 2.0, 3.0}) {
    const auto scaled = monogenic_kernel(x + d * t, x);
    EXPECT_LT(rel(scaled * std::pow(t, 3.0), monogenic_kernel(w, x)), 1e-14);
  }
  EXPECT_THROW(monogenic_kernel(w, w), Error);
}

TEST(MonogenicKernel, DiracResidualSmall) {
  for (int n : {3, 5}) {
    const auto w = para(n, 1.0, {0.5, -0.5, 0.2, 0.1, 0.3});
    const Field g = [&](const Multivector& y) { return monogenic_kernel(w, y); };
    const auto x = Multivector::scalar(n, 0.0);
    EXPECT_LT(dirac_residual(sample_axial(g, x, 1e-3, 3)), 1e-6) << n;
  }
}

TEST(FueterIntegral, ConstantMapsToZero) {
  const ImaginaryUnit e1({1.0, 0.0, 0.0});
  const auto x = para(3, 0.2, {0.1, 0.3, -0.2});
  EXPECT_LT(fueter_integral(SliceFunction::constant(Quaternion(1.0)), x, Contour(e1, 0.0, 2.0, 64)).norm(), 1e-12);
}

TEST(FueterIntegral, MatchesFiniteDifferenceLaplacian) {
  const ImaginaryUnit e1({1.0, 0.0, 0.0});
  const auto x = para(3, 0.2, {0.1, 0.3, -0.2});
  for (int m : {2, 3}) {
    const auto f = SliceFunction::monomial(m);
    const Field g = [&](const Multivector& y) { return eval(f, y); };
    const auto fd = fd_laplacian(g, 1e-3)(x);
    const auto fi = fueter_integral(f, x, Contour(e1, 0.0, 2.0, 64));
    EXPECT_LT((fi - fd).norm(), 1e-6) << m;
  }
  // closed forms for n = 3: Delta x^2 = -4, Delta x^3 = -12 x0 - 4 x
  const auto f3 = fueter_integral(SliceFunction::monomial(3), x, Contour(e1, 0.0, 2.0, 64));
  EXPECT_LT((f3 - (Multivector::scalar(3, -12.0 * x.re()) + x.im() * -4.0)).norm(), 1e-12);
}

TEST(FueterIntegral, AxialLaplacianOracle) {
  // For intrinsic f the Laplacian in R^{n+1} is (n-1)[d_r f0 / r + w (d_r f1 / r - f1 / r^2)].
  const ImaginaryUnit e1({1.0, 0.0, 0.0});
  const auto x = para(3, 0.3, {0.2, -0.4, 0.1});
  const double r = x.im_norm();
  const auto w = x.im() * (1.0 / r);
  for (const auto& f : {SliceFunction::exp(), SliceFunction::sin(), SliceFunction::monomial(5)}) {
    const auto p = f.parts(x.re(), r);
    const auto expected = Multivector::scalar(3, 2.0 * p.dv_f0.w / r) + w * (2.0 * (p.dv_f1.w / r - p.f1.w / (r * r)));
    EXPECT_LT((fueter_integral(f, x, Contour(e1, 0.0, 2.0, 64)) - expected).norm(), 1e-11) << f.kind();
  }
}

TEST(FueterIntegral, FiveDimensionalSquaredLaplacian) {
  const ImaginaryUnit e1({1.0, 0.0, 0.0, 0.0, 0.0});
  const auto x = para(5, 0.2, {0.1, -0.2, 0.15, 0.05, 0.1});
  const auto f = SliceFunction::monomial(5);
  const Field g = [&](const Multivector& y) { return eval(f, y); };
  const auto fd = fd_laplacian_power(g, 1e-2, 2)(x);
  const auto fi = fueter_integral(f, x, Contour(e1, 0.0, 2.0, 64));
  EXPECT_LT((fi - fd).norm(), 1e-6 * (1.0 + fi.norm()));
}

TEST(FueterIntegral, PlaneAndRadiusInvariance) {
  const ImaginaryUnit e1({1.0, 0.0, 0.0}), i2({0.3, -1.0, 0.5});
  const auto x = para(3, 0.2, {0.1, 0.3, -0.2});
  const auto f = SliceFunction::polynomial({Quaternion(0.0), Quaternion(1.0, 2.0), Quaternion(0.0),
                                            Quaternion(0.5, 0.0, 1.0, -1.0)});
  const auto a = fueter_integral(f, x, Contour(e1, 0.0, 2.0, 64));
  EXPECT_LT((a - fueter_integral(f, x, Contour(i2, 0.0, 2.0, 64))).norm(), 1e-10);
  EXPECT_LT((a - fueter_integral(f, x, Contour(i2, 0.5, 3.0, 96))).norm(), 1e-10);
  EXPECT_THROW(fueter_integral(f, x, Contour(e1, 3.0, 1.0, 64)), Error);
}

TEST(DiracResidual, ControlsAndConvergence) {
  const auto c = para(3, 0.1, {0.2, -0.1, 0.3});
  const Field constant = [](const Multivector& y) { return Multivector::scalar(y.dim(), 2.5); };
  EXPECT_EQ(dirac_residual(sample_axial(constant, c, 1e-2, 3)), 0.0);
  const Field x0 = [](const Multivector& y) { return Multivector::scalar(y.dim(), y.re()); };
  EXPECT_NEAR(dirac_residual(sample_axial(x0, c, 1e-2, 3)), 1.0, 1e-12);

  const ImaginaryUnit e1({1.0, 0.0, 0.0});
  const auto f = SliceFunction::exp();
  const Field fcheck = [&](const Multivector& y) { return fueter_integral(f, y, Contour(e1, 0.0, 2.0, 64)); };
  const double r1 = dirac_residual(sample_axial(fcheck, c, 2e-2, 3));
  const double r2 = dirac_residual(sample_axial(fcheck, c, 1e-2, 3));
  EXPECT_GE(r1 / r2, 3.5);
  EXPECT_LT(r2, 1e-2);
  EXPECT_THROW(sample_axial(constant, c, 1e-2, 2), Error);
}
