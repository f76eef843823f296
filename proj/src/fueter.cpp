#include "sspec/fueter.hpp"

#include <cmath>
#include <numbers>

namespace sspec {

FueterConstants constants(int n, int h) {
  if (n < 1 || n % 2 == 0) throw Error(ErrorKind::Domain, "Fueter-Sce constants need odd n");
  if (h < 0) throw Error(ErrorKind::Domain, "Laplacian power must be nonnegative");
  FueterConstants c;
  c.n = n;
  c.h = h;
  double C = (h % 2) ? -1.0 : 1.0;
  for (int l = 1; l <= h; ++l) C *= 2.0 * l * (n - 2 * l + 1);
  c.C = C;
  const int k = (n - 1) / 2;
  double fact = 1.0;
  for (int l = 2; l <= k; ++l) fact *= l;
  c.gamma = ((k % 2) ? -1.0 : 1.0) * std::ldexp(1.0, n - 1) * fact * fact;
  c.sigma = 2.0 * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
  return c;
}

SliceFunction tfs1(const HoloFn& g) {
  for (double u : {-0.7, 0.3, 1.1})
    for (double v : {0.2, 0.9}) {
      const cplx z(u, v);
      if (!g.in_domain(z) || !g.in_domain(std::conj(z))) continue;
      const cplx a = g.value(std::conj(z)), b = std::conj(g.value(z));
      if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(b)))
        throw Error(ErrorKind::Domain, "tfs1: g0 must be even and g1 odd in v");
    }
  return SliceFunction("induced", {{g, Quaternion(1.0)}});
}

Multivector kernel_shape(const Multivector& s, const Multivector& x, int h) {
  if (h < 0) throw Error(ErrorKind::Domain, "Laplacian power must be nonnegative");
  detail::require_para(s);
  detail::require_para(x);
  detail::guard_sphere(s, x);
  const Multivector q = s * s - s * (2.0 * x.re()) + Multivector::scalar(s.dim(), x.norm2());
  const Multivector qinv = q.inv();
  Multivector out = s - x.conj();
  for (int k = 0; k <= h; ++k) out = out * qinv;
  return out;
}

Multivector laplacian_power_kernel(const Multivector& s, const Multivector& x, int h) {
  return kernel_shape(s, x, h) * constants(x.dim(), h).C;
}

Multivector f_kernel(const Multivector& s, const Multivector& x) {
  const auto c = constants(x.dim(), (x.dim() - 1) / 2);
  return kernel_shape(s, x, c.h) * c.gamma;
}

Multivector monogenic_kernel(const Multivector& omega, const Multivector& x) {
  detail::require_para(omega);
  detail::require_para(x);
  const Multivector d = omega - x;
  const double r = d.norm();
  if (r == 0.0) throw Error(ErrorKind::SingularSphere, "monogenic kernel at coincident points");
  const int n = x.dim();
  return d.conj() * (1.0 / (constants(n, 0).sigma * std::pow(r, n + 1)));
}

Multivector fueter_integral(const SliceFunction& f, const Multivector& x, const Contour& ct) {
  if (ct.plane.dim() != x.dim()) throw Error(ErrorKind::DimensionMismatch, "contour plane dimension mismatch");
  check_contour_encloses(ct, x.re(), x.im_norm());
  if (!f.holomorphic_on_disc(ct.center, ct.radius))
    throw Error(ErrorKind::Domain, "function is not holomorphic on the contour disc");
  const Multivector i_unit = ct.plane.as_multivector();
  const int n = x.dim();
  Multivector sum(n);
  for (int k = 0; k < ct.nodes; ++k) {
    const cplx z = ct.node(k);
    const Multivector s = Multivector::scalar(n, z.real()) + i_unit * z.imag();
    const Multivector ds = Multivector::scalar(n, z.real() - ct.center) + i_unit * z.imag();
    sum += f_kernel(s, x) * ds * f.eval_slice(z.real(), z.imag(), i_unit, x);
  }
  return sum * (1.0 / ct.nodes);
}

std::size_t AxialMonogenicSample::index(const std::vector<int>& ijk) const {
  std::size_t idx = 0;
  for (int a = 0; a <= n; ++a) idx = idx * points + ijk[a];
  return idx;
}

Multivector AxialMonogenicSample::point(const std::vector<int>& ijk) const {
  const int mid = (points - 1) / 2;
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) v[j] = center[j + 1] + (ijk[j + 1] - mid) * h;
  return Multivector::paravector(n, center[0] + (ijk[0] - mid) * h, v);
}

namespace {

// Advances a multi-index over [lo, hi]^{n+1}; returns false after the last one.
bool next_index(std::vector<int>& ijk, int lo, int hi) {
  for (std::size_t a = ijk.size(); a-- > 0;) {
    if (++ijk[a] <= hi) return true;
    ijk[a] = lo;
  }
  return false;
}

}  // namespace

AxialMonogenicSample sample_axial(const std::function<Multivector(const Multivector&)>& fn,
                                  const Multivector& center, double h, int points) {
  if (points < 3 || points % 2 == 0)
    throw Error(ErrorKind::Precondition, "sample grid needs an odd count of at least 3 points per axis");
  if (!(h > 0.0)) throw Error(ErrorKind::Precondition, "grid spacing must be positive");
  detail::require_para(center);
  AxialMonogenicSample F;
  F.n = center.dim();
  F.h = h;
  F.points = points;
  F.center.push_back(center.re());
  for (double c : center.vector_part()) F.center.push_back(c);
  std::size_t total = 1;
  for (int a = 0; a <= F.n; ++a) total *= points;
  F.values.resize(total);
  std::vector<int> ijk(F.n + 1, 0);
  do {
    F.values[F.index(ijk)] = fn(F.point(ijk));
  } while (next_index(ijk, 0, points - 1));
  return F;
}

double dirac_residual(const AxialMonogenicSample& F) {
  if (F.points < 3) throw Error(ErrorKind::Precondition, "grid too coarse for central differences");
  double worst = 0.0;
  std::vector<int> ijk(F.n + 1, 1);
  do {
    Multivector d(F.n);
    for (int a = 0; a <= F.n; ++a) {
      auto p = ijk, m = ijk;
      ++p[a];
      --m[a];
      const Multivector diff = (F.values[F.index(p)] - F.values[F.index(m)]) * (0.5 / F.h);
      d += a == 0 ? diff : Multivector::basis(F.n, a) * diff;
    }
    worst = std::max(worst, d.norm());
  } while (next_index(ijk, 1, F.points - 2));
  return worst;
}

}  // namespace sspec
