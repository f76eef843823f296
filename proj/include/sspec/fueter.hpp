#pragma once

// Fueter-Sce construction in R^{n+1}, n odd: the induced slice function of a
// holomorphic map, closed forms of Delta^h applied to the slice Cauchy kernel,
// the F-kernel, the integral form of the Fueter-Sce map, the monogenic Cauchy
// kernel and a central-difference Dirac residual.

#include <functional>
#include <vector>

#include "sspec/slicefn.hpp"

namespace sspec {

struct FueterConstants {
  int n = 3;
  int h = 1;
  double C = 0.0;      // C_{n,h}
  double gamma = 0.0;  // C_{n,(n-1)/2}
  double sigma = 0.0;  // area of the unit sphere S^n in R^{n+1}
};

// Throws ErrorKind::Domain for even n or h < 0.
FueterConstants constants(int n, int h);

// Induced intrinsic function f(x) = g0(x0, |x|) + (x/|x|) g1(x0, |x|) of a
// holomorphic g = g0 + i g1. The parity of (g0, g1) in v is probed and a
// violation throws ErrorKind::Domain.
SliceFunction tfs1(const HoloFn& g);

// C_{n,h} (s - conj x)(s^2 - 2 Re(x) s + |x|^2)^{-(h+1)}
Multivector laplacian_power_kernel(const Multivector& s, const Multivector& x, int h);
// Same expression without the constant C_{n,h}.
Multivector kernel_shape(const Multivector& s, const Multivector& x, int h);
// gamma_n (s - conj x)(s^2 - 2 Re(x) s + |x|^2)^{-(n+1)/2}
Multivector f_kernel(const Multivector& s, const Multivector& x);
// conj(w - x) / (sigma_n |w - x|^{n+1})
Multivector monogenic_kernel(const Multivector& omega, const Multivector& x);

// (1/2 pi) \oint F_L(s, x) ds_I f(s) by the trapezoidal rule on ct; equals
// Delta^{(n-1)/2} f(x).
Multivector fueter_integral(const SliceFunction& f, const Multivector& x, const Contour& ct);

// Values on a uniform grid of (2k+1)^{n+1} points centred at a paravector.
struct AxialMonogenicSample {
  int n = 3;
  std::vector<double> center;  // n + 1 coordinates
  double h = 1e-2;
  int points = 3;              // per axis
  std::vector<Multivector> values;

  std::size_t index(const std::vector<int>& ijk) const;
  Multivector point(const std::vector<int>& ijk) const;
};

AxialMonogenicSample sample_axial(const std::function<Multivector(const Multivector&)>& fn,
                                  const Multivector& center, double h, int points);

// max over interior nodes of |dF/dx0 + sum_j e_j dF/dx_j| with central differences.
double dirac_residual(const AxialMonogenicSample& F);

}  // namespace sspec
