#pragma once

// Quaternions, Clifford multivectors of R_n (n odd, n <= 5), paravector
// geometry and axially symmetric sphere sets.
//
// Notation mapping: for a Quaternion q = w + x e1 + y e2 + z e3 the imaginary
// part is the vector (x, y, z) with e1 e2 = e3. For a Multivector paravector
// x0 + sum_j x_j e_j the imaginary part is sum_j x_j e_j, and in R_3 the
// product e1 e2 is the bivector blade e12, not e3. Points of R^3 used by the
// grid operators are plain std::array<double, 3> and never share a type with
// either of the above.

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sspec/error.hpp"

namespace sspec {

struct Quaternion {
  double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_ = 0.0, double y_ = 0.0, double z_ = 0.0)
      : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quaternion e1() { return {0, 1, 0, 0}; }
  static constexpr Quaternion e2() { return {0, 0, 1, 0}; }
  static constexpr Quaternion e3() { return {0, 0, 0, 1}; }

  constexpr Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  constexpr Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
  constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  constexpr Quaternion operator/(double s) const { return {w / s, x / s, y / s, z / s}; }
  friend constexpr Quaternion operator*(double s, const Quaternion& q) { return q * s; }

  // Hamilton product
  constexpr Quaternion operator*(const Quaternion& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }
  Quaternion& operator+=(const Quaternion& o) { return *this = *this + o; }
  Quaternion& operator-=(const Quaternion& o) { return *this = *this - o; }
  Quaternion& operator*=(double s) { return *this = *this * s; }

  constexpr bool operator==(const Quaternion&) const = default;

  constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  constexpr double re() const { return w; }
  constexpr Quaternion im() const { return {0, x, y, z}; }
  double im_norm() const { return std::sqrt(x * x + y * y + z * z); }
  Quaternion inv() const;
};

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

inline constexpr int kMaxCliffordDim = 5;
inline constexpr int kMaxBlades = 1 << kMaxCliffordDim;

// Element of the real Clifford algebra R_n with e_l^2 = -1. Blades are indexed
// by bitmask: bit (j-1) set means e_j is a factor, in increasing order.
class Multivector {
 public:
  Multivector() = default;
  explicit Multivector(int n);

  static Multivector scalar(int n, double value);
  static Multivector basis(int n, int j);  // e_j, 1 <= j <= n
  static Multivector blade(int n, std::uint32_t mask);
  static Multivector paravector(int n, double x0, std::span<const double> vec);

  int dim() const { return n_; }
  int blade_count() const { return 1 << n_; }

  double operator[](std::uint32_t mask) const { return c_[mask]; }
  double& operator[](std::uint32_t mask) { return c_[mask]; }

  Multivector operator+(const Multivector& o) const;
  Multivector operator-(const Multivector& o) const;
  Multivector operator-() const;
  Multivector operator*(const Multivector& o) const;
  Multivector operator*(double s) const;
  Multivector operator/(double s) const { return *this * (1.0 / s); }
  friend Multivector operator*(double s, const Multivector& m) { return m * s; }
  Multivector& operator+=(const Multivector& o);
  Multivector& operator-=(const Multivector& o);

  // Clifford conjugation; on paravectors x0 + x restricts to x0 - x.
  Multivector conj() const;
  double re() const { return c_[0]; }
  // Euclidean norm over all blade coefficients.
  double norm2() const;
  double norm() const { return std::sqrt(norm2()); }

  bool is_paravector(double tol = 0.0) const;
  double im_norm() const;  // |Im(x)| of the paravector part
  Multivector im() const;  // grade-1 part
  std::vector<double> vector_part() const;

  // Inverse of a paravector, conj(x)/|x|^2. Throws on non-paravector input.
  Multivector inv() const;

 private:
  int n_ = 0;
  std::array<double, kMaxBlades> c_{};
};

std::ostream& operator<<(std::ostream& os, const Multivector& m);

// Sign of e_A e_B for bitmask blades under e_l^2 = -1.
int blade_product_sign(std::uint32_t a, std::uint32_t b);

class ImaginaryUnit {
 public:
  // Normalizes the given direction; throws if it is zero.
  explicit ImaginaryUnit(std::vector<double> direction);

  int dim() const { return static_cast<int>(v_.size()); }
  const std::vector<double>& components() const { return v_; }
  Multivector as_multivector() const;
  // Requires dim() == 3.
  Quaternion as_quaternion() const;

 private:
  std::vector<double> v_;
};

struct ParavectorParts {
  double u = 0.0;
  double v = 0.0;                   // |Im(x)| >= 0
  std::optional<ImaginaryUnit> j;   // empty iff v == 0
};

ParavectorParts paravector_decompose(const Multivector& x);
ParavectorParts paravector_decompose(const Quaternion& q);

struct Sphere {
  double u = 0.0;
  double v = 0.0;
};

// Finite set of spheres [u + J v], stored as (u, v) with v >= 0 and deduplicated
// at relative tolerance.
class SphereSet {
 public:
  static constexpr double kDedupTol = 1e-8;

  SphereSet() = default;
  explicit SphereSet(double tol) : tol_(tol) {}

  // Returns false if (u, v) was merged into an existing sphere.
  bool insert(double u, double v);
  const std::vector<Sphere>& spheres() const { return spheres_; }
  std::size_t size() const { return spheres_.size(); }
  bool contains(double u, double v) const;

 private:
  bool close(const Sphere& s, double u, double v) const;
  double tol_ = kDedupTol;
  std::vector<Sphere> spheres_;
};

SphereSet sphere_of(const Multivector& x);
SphereSet sphere_of(const Quaternion& q);

// Principal slice power |s|^a e^{J a theta}, theta in (-pi, pi). Throws on the
// closed negative real axis.
Quaternion qpow(const Quaternion& s, double alpha);

// R_3 paravector <-> quaternion coordinate maps (w, x, y, z) <-> x0 + x e1 + y e2 + z e3.
// These are linear identifications of R^4 only; products are not preserved.
Multivector to_paravector(const Quaternion& q);
Quaternion to_quaternion(const Multivector& para3);

// Algebra embedding H -> R_n (n >= 2): i -> e1, j -> e2, k -> e1 e2. For n == 1
// only real quaternions are accepted.
Multivector embed_quaternion(int n, const Quaternion& q);

// Uniform helpers so that kernel formulas can be written once for both algebras.
inline Quaternion one_like(const Quaternion&) { return Quaternion(1.0); }
inline Multivector one_like(const Multivector& m) { return Multivector::scalar(m.dim(), 1.0); }
inline Quaternion scalar_like(const Quaternion&, double s) { return Quaternion(s); }
inline Multivector scalar_like(const Multivector& m, double s) { return Multivector::scalar(m.dim(), s); }
inline Quaternion unit_like(const Quaternion&, const ImaginaryUnit& j) { return j.as_quaternion(); }
inline Multivector unit_like(const Multivector&, const ImaginaryUnit& j) { return j.as_multivector(); }
inline Quaternion coefficient_like(const Quaternion&, const Quaternion& c) { return c; }
inline Multivector coefficient_like(const Multivector& m, const Quaternion& c) {
  return embed_quaternion(m.dim(), c);
}

}  // namespace sspec
