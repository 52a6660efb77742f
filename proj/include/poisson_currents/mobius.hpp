#pragma once

// Orientation-preserving isometries of H^2 and H^3 as unimodular 2x2
// matrices acting on the plane models R u {inf} and C u {inf}, carried to the
// ball by fixed conformal maps.
//
//   n = 2: Cayley map z -> (z - i)/(z + i) from the upper half-plane; i <-> 0.
//   n = 3: inversion in the sphere of radius sqrt(2) about (0, 0, -1)
//          followed by z -> -z, from the upper half-space; j <-> 0. On the
//          boundary it is inverse stereographic projection from the north pole:
//          w -> (2 Re w, 2 Im w, |w|^2 - 1) / (|w|^2 + 1).

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "poisson_currents/error.hpp"

namespace poisson_currents::mobius {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Point of the plane model's boundary, with an explicit point at infinity.
struct PlanePoint {
  Complex w;
  bool infinite = false;

  static PlanePoint at_infinity() { return {Complex{}, true}; }
};

/// Boundary of the ball (unit vector) to the plane model.
inline PlanePoint plane_from_sphere(int n, const Vec3& zeta) {
  if (n == 2) {
    const Complex u(zeta[0], zeta[1]);
    if (std::abs(u - 1.0) < 1e-300) return PlanePoint::at_infinity();
    // t = i (1 + u)/(1 - u) is real on the circle.
    return {Complex(std::real(Complex(0.0, 1.0) * (1.0 + u) / (1.0 - u)), 0.0), false};
  }
  const double x = zeta[0], y = zeta[1], z = zeta[2];
  if (z > 0.0) {
    if (x == 0.0 && y == 0.0) return PlanePoint::at_infinity();
    return {(1.0 + z) / Complex(x, -y), false};
  }
  return {Complex(x, y) / (1.0 - z), false};
}

/// Plane model to the boundary of the ball.
inline Vec3 sphere_from_plane(int n, const PlanePoint& p) {
  if (n == 2) {
    if (p.infinite) return {1.0, 0.0, 0.0};
    const double t = p.w.real();
    const Complex u = (Complex(t, 0.0) - Complex(0.0, 1.0)) / (Complex(t, 0.0) + Complex(0.0, 1.0));
    return {u.real(), u.imag(), 0.0};
  }
  if (p.infinite) return {0.0, 0.0, 1.0};
  const double m = std::norm(p.w);
  const double s = 1.0 / (m + 1.0);
  return {2.0 * p.w.real() * s, 2.0 * p.w.imag() * s, (m - 1.0) * s};
}

/// Upper half-space point (w, t), t > 0 (for n = 2, w is real).
struct HalfSpacePoint {
  Complex w;
  double t = 1.0;
};

inline HalfSpacePoint half_space_from_ball(int n, const Vec3& x) {
  if (n == 2) {
    const Complex z(x[0], x[1]);
    const Complex tau = Complex(0.0, 1.0) * (1.0 + z) / (1.0 - z);
    return {Complex(tau.real(), 0.0), tau.imag()};
  }
  // Undo z -> -z, then invert about (0, 0, -1) with radius^2 = 2.
  const Vec3 y{x[0], x[1], -x[2]};
  const Vec3 shifted{y[0], y[1], y[2] + 1.0};
  const double s = 2.0 / (shifted[0] * shifted[0] + shifted[1] * shifted[1] + shifted[2] * shifted[2]);
  return {Complex(s * shifted[0], s * shifted[1]), s * shifted[2] - 1.0};
}

inline Vec3 ball_from_half_space(int n, const HalfSpacePoint& p) {
  if (n == 2) {
    const Complex tau(p.w.real(), p.t);
    const Complex z = (tau - Complex(0.0, 1.0)) / (tau + Complex(0.0, 1.0));
    return {z.real(), z.imag(), 0.0};
  }
  const Vec3 shifted{p.w.real(), p.w.imag(), p.t + 1.0};
  const double s = 2.0 / (shifted[0] * shifted[0] + shifted[1] * shifted[1] + shifted[2] * shifted[2]);
  return {s * shifted[0], s * shifted[1], -(s * shifted[2] - 1.0)};
}

/// Unimodular matrix [[a, b], [c, d]]; real entries when n = 2.
class MobiusIsometry {
 public:
  MobiusIsometry(int n, Complex a, Complex b, Complex c, Complex d) : n_(n) {
    if (n != 2 && n != 3) throw DomainError("MobiusIsometry: n must be 2 or 3");
    const Complex det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw DomainError("MobiusIsometry: singular matrix");
    if (n == 2) {
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
      if (std::abs(a.imag()) + std::abs(b.imag()) + std::abs(c.imag()) + std::abs(d.imag()) > 1e-12 * scale ||
          !(det.real() > 0.0)) {
        throw DomainError("MobiusIsometry: n = 2 needs a real matrix with positive determinant");
      }
    }
    const Complex root = std::sqrt(det);
    m_ = {a / root, b / root, c / root, d / root};
    if (n == 2) {
      for (auto& e : m_) e = Complex(e.real(), 0.0);
    }
  }

  static MobiusIsometry identity(int n) { return MobiusIsometry(n, 1.0, 0.0, 0.0, 1.0); }

  int n() const { return n_; }
  Complex a() const { return m_[0]; }
  Complex b() const { return m_[1]; }
  Complex c() const { return m_[2]; }
  Complex d() const { return m_[3]; }
  Complex determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  MobiusIsometry inverse() const { return MobiusIsometry(n_, m_[3], -m_[1], -m_[2], m_[0], Raw{}); }

  MobiusIsometry operator*(const MobiusIsometry& o) const {
    return MobiusIsometry(n_, m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
                          m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3], Raw{});
  }

  /// (a w + b)/(c w + d) with projective handling of infinity.
  PlanePoint apply_plane(const PlanePoint& p) const {
    const auto [a, b, c, d] = m_;
    if (p.infinite) {
      if (std::abs(c) == 0.0) return PlanePoint::at_infinity();
      return {a / c, false};
    }
    const Complex den = c * p.w + d;
    if (std::abs(den) == 0.0) return PlanePoint::at_infinity();
    return {(a * p.w + b) / den, false};
  }

  /// Action on the boundary sphere (unit vectors).
  Vec3 apply_boundary(const Vec3& zeta) const { return sphere_from_plane(n_, apply_plane(plane_from_sphere(n_, zeta))); }

  /// Poincare extension to the upper half-space.
  HalfSpacePoint apply_half_space(const HalfSpacePoint& p) const {
    const auto [a, b, c, d] = m_;
    const Complex cw_d = c * p.w + d;
    const double den = std::norm(cw_d) + std::norm(c) * p.t * p.t;
    const Complex w = ((a * p.w + b) * std::conj(cw_d) + a * std::conj(c) * p.t * p.t) / den;
    return {n_ == 2 ? Complex(w.real(), 0.0) : w, p.t / den};
  }

  /// Action on the open ball.
  Vec3 apply_ball(const Vec3& x) const { return ball_from_half_space(n_, apply_half_space(half_space_from_ball(n_, x))); }

  /// d(0, gamma 0) from cosh d = (|a|^2 + |b|^2 + |c|^2 + |d|^2)/2.
  double displacement() const {
    const double s = 0.5 * (std::norm(m_[0]) + std::norm(m_[1]) + std::norm(m_[2]) + std::norm(m_[3]));
    return s <= 1.0 ? 0.0 : std::acosh(s);
  }

 private:
  struct Raw {};
  // Already unimodular: skip normalisation.
  MobiusIsometry(int n, Complex a, Complex b, Complex c, Complex d, Raw) : n_(n), m_{a, b, c, d} {}

  int n_;
  std::array<Complex, 4> m_;
};

/// Cross-ratio (z1, z2; z3, z4) = (z1 - z3)(z2 - z4) / ((z1 - z4)(z2 - z3)) of finite points.
inline Complex cross_ratio(Complex z1, Complex z2, Complex z3, Complex z4) {
  return (z1 - z3) * (z2 - z4) / ((z1 - z4) * (z2 - z3));
}

}  // namespace poisson_currents::mobius
