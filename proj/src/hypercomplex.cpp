#include "sspec/hypercomplex.hpp"

#include <algorithm>
#include <bit>
#include <numbers>
#include <ostream>
#include <string>

namespace sspec {

namespace {

void require_dim(int n) {
  if (n != 1 && n != 3 && n != 5)
    throw Error(ErrorKind::DimensionMismatch, "Clifford dimension must be 1, 3 or 5, got " + std::to_string(n));
}

struct SignTable {
  std::array<std::array<signed char, kMaxBlades>, kMaxBlades> s{};
  SignTable() {
    for (std::uint32_t a = 0; a < kMaxBlades; ++a)
      for (std::uint32_t b = 0; b < kMaxBlades; ++b) {
        // count transpositions needed to merge the ordered factor lists
        int swaps = 0;
        for (std::uint32_t bb = b; bb; bb &= bb - 1) {
          const std::uint32_t bit = bb & (~bb + 1);
          swaps += std::popcount(a & ~((bit << 1) - 1));
        }
        swaps += std::popcount(a & b);  // each e_l e_l = -1
        s[a][b] = (swaps % 2) ? -1 : 1;
      }
  }
};

const SignTable& sign_table() {
  static const SignTable table;
  return table;
}

}  // namespace

Quaternion Quaternion::inv() const {
  const double n2 = norm2();
  if (n2 == 0.0) throw Error(ErrorKind::Domain, "inverse of zero quaternion");
  return conj() / n2;
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

int blade_product_sign(std::uint32_t a, std::uint32_t b) { return sign_table().s[a][b]; }

Multivector::Multivector(int n) : n_(n) { require_dim(n); }

Multivector Multivector::scalar(int n, double value) {
  Multivector m(n);
  m.c_[0] = value;
  return m;
}

Multivector Multivector::basis(int n, int j) {
  Multivector m(n);
  if (j < 1 || j > n) throw Error(ErrorKind::DimensionMismatch, "basis index out of range");
  m.c_[1u << (j - 1)] = 1.0;
  return m;
}

Multivector Multivector::blade(int n, std::uint32_t mask) {
  Multivector m(n);
  if (mask >= static_cast<std::uint32_t>(m.blade_count()))
    throw Error(ErrorKind::DimensionMismatch, "blade mask out of range");
  m.c_[mask] = 1.0;
  return m;
}

Multivector Multivector::paravector(int n, double x0, std::span<const double> vec) {
  Multivector m(n);
  if (static_cast<int>(vec.size()) != n)
    throw Error(ErrorKind::DimensionMismatch, "paravector needs exactly n vector components");
  m.c_[0] = x0;
  for (int j = 0; j < n; ++j) m.c_[1u << j] = vec[j];
  return m;
}

Multivector Multivector::operator+(const Multivector& o) const {
  Multivector r = *this;
  return r += o;
}

Multivector Multivector::operator-(const Multivector& o) const {
  Multivector r = *this;
  return r -= o;
}

Multivector& Multivector::operator+=(const Multivector& o) {
  if (n_ != o.n_) throw Error(ErrorKind::DimensionMismatch, "multivector dimension mismatch");
  for (int k = 0; k < blade_count(); ++k) c_[k] += o.c_[k];
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& o) {
  if (n_ != o.n_) throw Error(ErrorKind::DimensionMismatch, "multivector dimension mismatch");
  for (int k = 0; k < blade_count(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Multivector Multivector::operator-() const {
  Multivector r = *this;
  for (int k = 0; k < blade_count(); ++k) r.c_[k] = -r.c_[k];
  return r;
}

Multivector Multivector::operator*(double s) const {
  Multivector r = *this;
  for (int k = 0; k < blade_count(); ++k) r.c_[k] *= s;
  return r;
}

Multivector Multivector::operator*(const Multivector& o) const {
  if (n_ != o.n_) throw Error(ErrorKind::DimensionMismatch, "multivector dimension mismatch");
  const auto& table = sign_table().s;
  Multivector r(n_);
  const auto nb = static_cast<std::uint32_t>(blade_count());
  for (std::uint32_t a = 0; a < nb; ++a) {
    const double ca = c_[a];
    if (ca == 0.0) continue;
    for (std::uint32_t b = 0; b < nb; ++b) {
      const double cb = o.c_[b];
      if (cb == 0.0) continue;
      r.c_[a ^ b] += table[a][b] * ca * cb;
    }
  }
  return r;
}

Multivector Multivector::conj() const {
  // Clifford conjugate: reversion composed with grade involution, sign per grade k
  // is (-1)^{k(k+1)/2}.
  Multivector r = *this;
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(blade_count()); ++a) {
    const int k = std::popcount(a);
    if ((k * (k + 1) / 2) % 2) r.c_[a] = -r.c_[a];
  }
  return r;
}

double Multivector::norm2() const {
  double s = 0.0;
  for (int k = 0; k < blade_count(); ++k) s += c_[k] * c_[k];
  return s;
}

bool Multivector::is_paravector(double tol) const {
  const double scale = std::max(1.0, norm());
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(blade_count()); ++a)
    if (std::popcount(a) > 1 && std::abs(c_[a]) > tol * scale) return false;
  return true;
}

double Multivector::im_norm() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += c_[1u << j] * c_[1u << j];
  return std::sqrt(s);
}

Multivector Multivector::im() const {
  Multivector r(n_);
  for (int j = 0; j < n_; ++j) r.c_[1u << j] = c_[1u << j];
  return r;
}

std::vector<double> Multivector::vector_part() const {
  std::vector<double> v(n_);
  for (int j = 0; j < n_; ++j) v[j] = c_[1u << j];
  return v;
}

Multivector Multivector::inv() const {
  if (!is_paravector(1e-12))
    throw Error(ErrorKind::Domain, "inverse is only provided for paravectors");
  const double n2 = c_[0] * c_[0] + im_norm() * im_norm();
  if (n2 == 0.0) throw Error(ErrorKind::Domain, "inverse of zero paravector");
  Multivector r(n_);
  r.c_[0] = c_[0] / n2;
  for (int j = 0; j < n_; ++j) r.c_[1u << j] = -c_[1u << j] / n2;
  return r;
}

std::ostream& operator<<(std::ostream& os, const Multivector& m) {
  os << '[';
  for (int k = 0; k < m.blade_count(); ++k) os << (k ? ", " : "") << m[static_cast<std::uint32_t>(k)];
  return os << ']';
}

ImaginaryUnit::ImaginaryUnit(std::vector<double> direction) : v_(std::move(direction)) {
  double n2 = 0.0;
  for (double c : v_) n2 += c * c;
  if (v_.empty() || n2 == 0.0) throw Error(ErrorKind::Domain, "imaginary unit needs a nonzero direction");
  const double n = std::sqrt(n2);
  for (double& c : v_) c /= n;
}

Multivector ImaginaryUnit::as_multivector() const { return Multivector::paravector(dim(), 0.0, v_); }

Quaternion ImaginaryUnit::as_quaternion() const {
  if (dim() != 3) throw Error(ErrorKind::DimensionMismatch, "quaternion imaginary unit needs 3 components");
  return {0.0, v_[0], v_[1], v_[2]};
}

ParavectorParts paravector_decompose(const Multivector& x) {
  if (!x.is_paravector(1e-12)) throw Error(ErrorKind::Domain, "paravector_decompose: input has grade > 1 parts");
  ParavectorParts p;
  p.u = x.re();
  p.v = x.im_norm();
  if (p.v > 0.0) p.j = ImaginaryUnit(x.vector_part());
  return p;
}

ParavectorParts paravector_decompose(const Quaternion& q) {
  ParavectorParts p;
  p.u = q.w;
  p.v = q.im_norm();
  if (p.v > 0.0) p.j = ImaginaryUnit({q.x, q.y, q.z});
  return p;
}

bool SphereSet::close(const Sphere& s, double u, double v) const {
  const double scale = std::max({1.0, std::hypot(s.u, s.v), std::hypot(u, v)});
  return std::abs(s.u - u) <= tol_ * scale && std::abs(s.v - v) <= tol_ * scale;
}

bool SphereSet::insert(double u, double v) {
  v = std::abs(v);
  for (const auto& s : spheres_)
    if (close(s, u, v)) return false;
  spheres_.push_back({u, v});
  std::sort(spheres_.begin(), spheres_.end(),
            [](const Sphere& a, const Sphere& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return true;
}

bool SphereSet::contains(double u, double v) const {
  v = std::abs(v);
  return std::any_of(spheres_.begin(), spheres_.end(), [&](const Sphere& s) { return close(s, u, v); });
}

SphereSet sphere_of(const Multivector& x) {
  const auto p = paravector_decompose(x);
  SphereSet s;
  s.insert(p.u, p.v);
  return s;
}

SphereSet sphere_of(const Quaternion& q) {
  SphereSet s;
  s.insert(q.w, q.im_norm());
  return s;
}

Quaternion qpow(const Quaternion& s, double alpha) {
  const double v = s.im_norm();
  if (v == 0.0 && s.w <= 0.0)
    throw Error(ErrorKind::Domain, "qpow: argument on the closed negative real axis");
  const double r = s.norm();
  const double theta = std::atan2(v, s.w);  // in [0, pi) since v >= 0
  const double ra = std::pow(r, alpha);
  if (v == 0.0) return Quaternion(ra);
  const Quaternion j = s.im() / v;
  return Quaternion(ra * std::cos(alpha * theta)) + j * (ra * std::sin(alpha * theta));
}

Multivector to_paravector(const Quaternion& q) {
  const double v[3] = {q.x, q.y, q.z};
  return Multivector::paravector(3, q.w, v);
}

Quaternion to_quaternion(const Multivector& para3) {
  if (para3.dim() != 3 || !para3.is_paravector(1e-12))
    throw Error(ErrorKind::DimensionMismatch, "to_quaternion needs an R_3 paravector");
  return {para3[0], para3[1], para3[2], para3[4]};
}

Multivector embed_quaternion(int n, const Quaternion& q) {
  Multivector m(n);
  m[0] = q.w;
  if (n == 1) {
    if (q.x != 0.0 || q.y != 0.0 || q.z != 0.0)
      throw Error(ErrorKind::DimensionMismatch, "R_1 cannot hold a non-real quaternion coefficient");
    return m;
  }
  m[1] = q.x;
  m[2] = q.y;
  m[3] = q.z;  // e1 e2
  return m;
}

}  // namespace sspec
