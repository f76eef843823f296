#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sspec/fueter.hpp"
#include "sspec/scalc.hpp"

using namespace sspec;

namespace {

Quaternion random_q(std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  return {d(rng), d(rng), d(rng), d(rng)};
}

QMatrix random_qmatrix(std::mt19937& rng, int m, double scale = 1.0) {
  QMatrix T(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) T(i, j) = random_q(rng, scale);
  return T;
}

QMatrix normalized(const QMatrix& T, double target) { return T * (target / T.norm()); }

const ImaginaryUnit kE1({1.0, 0.0, 0.0});

Contour contour_for(const QMatrix& T, const ImaginaryUnit& plane = kE1, int nodes = 128) {
  return default_contour(s_spectrum(T), plane, nodes);
}

double rel(const QMatrix& a, const QMatrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST(QMatrix, ComplexAdjointIsMultiplicative) {
  std::mt19937 rng(1);
  for (int t = 0; t < 20; ++t) {
    const QMatrix A = random_qmatrix(rng, 3), B = random_qmatrix(rng, 3);
    EXPECT_LT((complex_adjoint(A * B) - complex_adjoint(A) * complex_adjoint(B)).norm(), 1e-12);
    EXPECT_LT((from_complex_adjoint(complex_adjoint(A)) - A).norm(), 0.0 + 1e-15);
  }
}

TEST(QMatrix, InverseAndSolve) {
  std::mt19937 rng(2);
  const QMatrix A = random_qmatrix(rng, 4);
  EXPECT_LT((A * inverse(A) - QMatrix::identity(4)).norm(), 1e-12);
  EXPECT_LT((inverse(A) * A - QMatrix::identity(4)).norm(), 1e-12);
  QMatrix S(2);
  S(0, 0) = Quaternion::e1();
  S(0, 1) = Quaternion::e2();
  S(1, 0) = Quaternion::e1();
  S(1, 1) = Quaternion::e2();
  EXPECT_THROW(inverse(S), Error);
}

TEST(SSpectrum, Examples) {
  const SphereSet d = s_spectrum(QMatrix::diag({Quaternion(2.0), Quaternion(3.0)}));
  EXPECT_EQ(d.size(), 2u);
  EXPECT_TRUE(d.contains(2.0, 0.0));
  EXPECT_TRUE(d.contains(3.0, 0.0));
  const SphereSet u = s_spectrum(QMatrix::diag({Quaternion::e1()}));
  EXPECT_EQ(u.size(), 1u);
  EXPECT_TRUE(u.contains(0.0, 1.0));
  // e1 and e2 share the unit sphere
  EXPECT_EQ(s_spectrum(QMatrix::diag({Quaternion::e1(), Quaternion::e2()})).size(), 1u);
  EXPECT_THROW(s_spectrum(QMatrix(2, 3)), Error);
}

TEST(SSpectrum, ContainsRightEigenvalues) {
  std::mt19937 rng(3);
  const QMatrix P = random_qmatrix(rng, 3);
  const std::vector<Quaternion> lam = {Quaternion(1.0, 0.5, -0.2, 0.1), Quaternion(-0.7), Quaternion(0.3, 0, 0, 2)};
  const QMatrix T = P * QMatrix::diag(lam) * inverse(P);
  const SphereSet s = s_spectrum(T);
  EXPECT_EQ(s.size(), 3u);
  for (const auto& l : lam) EXPECT_TRUE(s.contains(l.w, l.im_norm()));
}

TEST(SSpectrum, ScanAgreesWithEigenvalues) {
  std::mt19937 rng(4);
  for (int t = 0; t < 3; ++t) {
    const QMatrix T = random_qmatrix(rng, 3, 0.6);
    const SpectrumScan scan = scan_s_spectrum(T);
    EXPECT_TRUE(scan.consistent) << "trial " << t;
    EXPECT_GT(scan.min_off_spectrum, 1e-4);
    for (const auto& m : scan.minima) EXPECT_LT(m.sigma, 1e-8);
  }
}

TEST(SSpectrum, QsMatrixSingularOnSpectrum) {
  const QMatrix T = QMatrix::diag({Quaternion(0.5, 0.0, 1.2, 0.0)});
  EXPECT_LT(qs_sigma_min(T, 0.5, 1.2), 1e-14);
  EXPECT_GT(qs_sigma_min(T, 0.5, 0.2), 0.1);
}

TEST(SResolvent, MatchesSeriesOutsideBall) {
  std::mt19937 rng(5);
  for (int t = 0; t < 20; ++t) {
    const QMatrix T = normalized(random_qmatrix(rng, 3), 0.4);
    const Quaternion s = random_q(rng);
    const Quaternion su = s * (2.0 / s.norm());
    const QMatrix left = s_resolvent_left(T, su), series = resolvent_series(T, su, 80);
    EXPECT_LT(rel(left, series), 1e-12);
    QMatrix right_series(3);
    QMatrix Tk = QMatrix::identity(3);
    Quaternion sk = su.inv();
    for (int k = 0; k <= 80; ++k) {
      right_series += Tk.scale_left(sk);
      Tk = Tk * T;
      sk = sk * su.inv();
    }
    EXPECT_LT(rel(s_resolvent_right(T, su), right_series), 1e-12);
  }
}

TEST(SResolvent, LeftAndRightDifferAndSingularThrows) {
  std::mt19937 rng(6);
  const QMatrix T = random_qmatrix(rng, 3);
  const Quaternion s(0.3, 0.2, 1.4, -0.5);
  EXPECT_GT((s_resolvent_left(T, s) - s_resolvent_right(T, s)).norm(), 1e-3);
  // resolvent equation: S_L (s - T) for scalar-commuting T reduces to identity
  const QMatrix Tr = QMatrix::diag({Quaternion(0.5), Quaternion(-0.4)});
  const QMatrix R = s_resolvent_left(Tr, s);
  EXPECT_LT((R.scale_right(s) - Tr * R - QMatrix::identity(2)).norm(), 1e-12);
  const QMatrix U = QMatrix::diag({Quaternion::e1()});
  EXPECT_THROW(s_resolvent_left(U, Quaternion(0.0, 0.0, 0.0, 1.0)), Error);
}

TEST(SCalculus, PolynomialCompatibility) {
  std::mt19937 rng(7);
  for (int t = 0; t < 5; ++t) {
    const QMatrix T = random_qmatrix(rng, 4, 0.5);
    const Contour ct = contour_for(T);
    for (int m = 0; m <= 4; ++m)
      EXPECT_LT(rel(s_functional_calculus(T, SliceFunction::monomial(m), ct), power(T, m)), 1e-10) << "m=" << m;
  }
}

TEST(SCalculus, QuaternionCoefficientsActOnTheRight) {
  std::mt19937 rng(8);
  const QMatrix T = random_qmatrix(rng, 3, 0.5);
  const Quaternion a = random_q(rng), b = random_q(rng);
  const SliceFunction f = SliceFunction::polynomial({a, Quaternion(0.0), b});
  const QMatrix expect = QMatrix::identity(3).scale_right(a) + (T * T).scale_right(b);
  EXPECT_LT(rel(s_functional_calculus(T, f, contour_for(T)), expect), 1e-10);
}

TEST(SCalculus, ReducesToRieszDunford) {
  std::mt19937 rng(9);
  std::normal_distribution<double> d(0.0, 0.6);
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXcd M(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) M(i, j) = {d(rng), d(rng)};
    const QMatrix T = embed_complex(M);
    const Contour ct = contour_for(T);
    for (const HoloFn& g : {HoloFn::exp(), HoloFn::sin(), HoloFn::power(3)}) {
      const QMatrix fT = s_functional_calculus(T, SliceFunction("g", {{g, Quaternion(1.0)}}), ct);
      const QMatrix oracle = embed_complex(riesz_dunford_oracle(M, g, ct.center, ct.radius, 256));
      EXPECT_LT(rel(fT, oracle), 1e-10);
    }
  }
}

TEST(SCalculus, AutoRefinementConverges) {
  std::mt19937 rng(10);
  const QMatrix T = random_qmatrix(rng, 3, 0.5);
  const CalculusResult r = s_functional_calculus_auto(T, SliceFunction::exp(), kE1, 1e-12);
  EXPECT_LE(r.change, 1e-12);
  EXPECT_GE(r.nodes, 256);
  const QMatrix ref = s_functional_calculus(T, SliceFunction::exp(), contour_for(T, kE1, 1024));
  EXPECT_LT(rel(r.value, ref), 1e-11);
}

TEST(SCalculus, LinearityAndPlaneIndependence) {
  std::mt19937 rng(11);
  const QMatrix T = random_qmatrix(rng, 3, 0.5);
  const Contour ct = contour_for(T);
  const SliceFunction f = SliceFunction::exp(Quaternion(0.2, 1.0, -0.3, 0.4));
  const SliceFunction g = SliceFunction::sin(Quaternion(-1.0, 0.0, 0.5, 0.0));
  const QMatrix fT = s_functional_calculus(T, f, ct), gT = s_functional_calculus(T, g, ct);
  EXPECT_LT(rel(s_functional_calculus(T, f + g, ct), fT + gT), 1e-12);
  EXPECT_LT(rel(s_functional_calculus(T, f.scaled(-2.5), ct), fT * -2.5), 1e-12);
  for (const auto& dir : {std::vector<double>{0.0, 1.0, 0.0}, {1.0, 2.0, -2.0}, {0.0, 0.3, 1.0}}) {
    const ImaginaryUnit J(dir);
    EXPECT_LT(rel(s_functional_calculus(T, f, contour_for(T, J)), fT), 1e-10);
  }
}

TEST(SCalculus, RefusesNonEnclosingContourAndBranchCut) {
  const QMatrix T = QMatrix::diag({Quaternion(3.0), Quaternion(0.0, 1.0, 0.0, 0.0)});
  EXPECT_THROW(s_functional_calculus(T, SliceFunction::exp(), Contour(kE1, 0.0, 2.0, 64)), Error);
  EXPECT_THROW(s_functional_calculus(T, SliceFunction::power(0.5), contour_for(T)), Error);
}

TEST(SCalculus, IntrinsicEigenOracle) {
  std::mt19937 rng(12);
  for (int t = 0; t < 5; ++t) {
    const QMatrix P = random_qmatrix(rng, 3);
    std::vector<Quaternion> lam;
    for (int k = 0; k < 3; ++k) lam.push_back(random_q(rng, 0.6));
    const QMatrix T = P * QMatrix::diag(lam) * inverse(P);
    const Contour ct = contour_for(T, kE1, 256);
    for (const SliceFunction& f : {SliceFunction::exp(), SliceFunction::cos(), SliceFunction::monomial(5)}) {
      const QMatrix fT = s_functional_calculus(T, f, ct);
      EXPECT_LT(rel(fT, intrinsic_eigen_oracle(P, lam, f)), 1e-9);
      for (int k = 0; k < 3; ++k) {
        std::vector<Quaternion> v;
        for (int i = 0; i < 3; ++i) v.push_back(P(i, k));
        EXPECT_LE(eigen_relation_residual(fT, v, lam[k], f), 1e-9);
      }
    }
  }
}

TEST(SCalculus, NonIntrinsicCounterexample) {
  const QMatrix T = QMatrix::diag({Quaternion::e1()});
  const Quaternion v(1.0, 0.0, 0.0, 1.0);
  const Quaternion lambda = v.inv() * Quaternion::e1() * v;
  const SliceFunction f = SliceFunction::monomial(1, Quaternion::e2());
  const QMatrix fT = s_functional_calculus(T, f, contour_for(T));
  EXPECT_NEAR(eigen_relation_residual(fT, {v}, lambda, f), 2.0, 1e-9);
  EXPECT_THROW(intrinsic_eigen_oracle(QMatrix::identity(1), {lambda}, f), Error);
}

TEST(SCalculus, ProductRule) {
  std::mt19937 rng(13);
  const QMatrix T = random_qmatrix(rng, 3, 0.5);
  const Contour ct = contour_for(T, kE1, 256);
  const SliceFunction g = SliceFunction::polynomial({Quaternion(0.5), Quaternion(0.0, 1.0, 0.0, -1.0), random_q(rng)});
  EXPECT_LE(product_rule_check(T, SliceFunction::exp(), g, ct), 1e-9);
  EXPECT_LE(product_rule_check(T, SliceFunction::sin(), SliceFunction::exp(Quaternion::e3()), ct), 1e-9);

  const QMatrix U = QMatrix::diag({Quaternion::e1()});
  const double r = product_rule_check(U, SliceFunction::monomial(1, Quaternion::e2()), SliceFunction::monomial(1),
                                      contour_for(U));
  EXPECT_NEAR(r, 2.0, 1e-9);
}

namespace {

// A_j = V diag(a_j) V^T for a fixed rotation V.
ParavectorOpTuple symmetric_triple(double angle, const std::vector<std::vector<double>>& eig) {
  Eigen::Matrix2d V;
  V << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  std::vector<Eigen::MatrixXd> t{Eigen::MatrixXd::Zero(2, 2)};
  for (const auto& a : eig) t.push_back(V * Eigen::Vector2d(a[0], a[1]).asDiagonal() * V.transpose());
  return ParavectorOpTuple::make(t);
}

}  // namespace

TEST(FCalculus, CommutativeSpectrum) {
  const QMatrix T = QMatrix::diag({Quaternion::e1(), Quaternion(2.0, 0.0, 1.0, 0.0)});
  const ParavectorOpTuple P = ParavectorOpTuple::from_qmatrix(T);
  ASSERT_TRUE(P.commuting);
  const SphereSet s = commutative_s_spectrum(P);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(0.0, 1.0));
  EXPECT_TRUE(s.contains(2.0, 1.0));

  const ParavectorOpTuple A = symmetric_triple(0.4, {{0.3, -0.2}, {0.1, 0.5}, {-0.4, 0.2}});
  const SphereSet sa = commutative_s_spectrum(A);
  EXPECT_TRUE(sa.contains(0.0, std::sqrt(0.09 + 0.01 + 0.16)));
  EXPECT_TRUE(sa.contains(0.0, std::sqrt(0.04 + 0.25 + 0.04)));
}

TEST(FCalculus, NoncommutingRejected) {
  const QMatrix T = QMatrix::from_components(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd{{0, 1}, {1, 0}},
                                             Eigen::MatrixXd{{1, 0}, {0, -1}}, Eigen::MatrixXd::Zero(2, 2));
  const ParavectorOpTuple P = ParavectorOpTuple::from_qmatrix(T);
  EXPECT_FALSE(P.commuting);
  try {
    f_functional_calculus(P, SliceFunction::exp(), Contour(kE1, 0.0, 3.0, 64));
    FAIL() << "expected a precondition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    EXPECT_NE(std::string(e.what()).find("commuting components required"), std::string::npos);
  }
}

TEST(FCalculus, ConstantMapsToZero) {
  const ParavectorOpTuple A = symmetric_triple(0.7, {{0.3, -0.2}, {0.1, 0.5}, {-0.4, 0.2}});
  const MvMatrix F = f_functional_calculus(A, SliceFunction::constant(Quaternion(1.0)), Contour(kE1, 0.0, 1.5, 128));
  EXPECT_LT(F.norm(), 1e-12);
}

TEST(FCalculus, InteractionWithMonogenicCalculus) {
  const ParavectorOpTuple A = symmetric_triple(0.7, {{0.3, -0.2}, {0.1, 0.5}, {-0.4, 0.2}});
  const SliceFunction f = tfs1(HoloFn::exp());
  const double R = 1.0;
  const Contour fc_contour(kE1, 0.0, 1.5 * R, 96);
  auto fcheck = [&](const Multivector& x) { return fueter_integral(f, x, fc_contour); };

  const MvMatrix viaF = f_functional_calculus(A, f, Contour(kE1, 0.0, 1.0, 128));
  const MvMatrix viaM = monogenic_functional_calculus(A, fcheck, SphereQuadrature{R, 24});
  const MvMatrix oracle = joint_eigen_oracle(A, fcheck);
  EXPECT_LT((viaF - oracle).norm(), 1e-9 * std::max(1.0, oracle.norm()));
  EXPECT_LT((viaM - oracle).norm(), 1e-6 * std::max(1.0, oracle.norm()));
  EXPECT_LT((viaF - viaM).norm(), 1e-6 * std::max(1.0, oracle.norm()));
  EXPECT_GT(oracle.norm(), 1.0);
}

TEST(MonogenicCalculus, Preconditions) {
  auto one = [](const Multivector& x) { return Multivector::scalar(x.dim(), 1.0); };
  const ParavectorOpTuple A = symmetric_triple(0.2, {{0.3, -0.2}, {0.1, 0.5}, {-0.4, 0.2}});
  EXPECT_THROW(monogenic_functional_calculus(A, one, SphereQuadrature{0.3, 8}), Error);
  auto B = A;
  B.t[0] = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(monogenic_functional_calculus(B, one, SphereQuadrature{1.0, 8}), Error);
  // constant monogenic function reproduces the identity
  const double e16 = (monogenic_functional_calculus(A, one, SphereQuadrature{1.0, 16}) - MvMatrix::identity(3, 2)).norm();
  const double e32 = (monogenic_functional_calculus(A, one, SphereQuadrature{1.0, 32}) - MvMatrix::identity(3, 2)).norm();
  EXPECT_LT(e32, 1e-7);
  EXPECT_LT(e32, 1e-2 * e16);
}
