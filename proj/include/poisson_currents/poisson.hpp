#pragma once

// Poisson transforms on the ball model of H^n: the harmonic extension Phi_0
// of functions and the transform Phi_p of exact p-forms, together with shell
// restriction, shell pairings and the ball L^2 norm.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "poisson_currents/error.hpp"
#include "poisson_currents/parallel.hpp"
#include "poisson_currents/quadrature.hpp"
#include "poisson_currents/specfun.hpp"
#include "poisson_currents/sphere.hpp"

namespace poisson_currents::poisson {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using sphere::SpectralForm;
using sphere::SpherePoint;

inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Point of the open unit ball in R^n (third coordinate unused for n = 2).
class BallPoint {
 public:
  BallPoint(int n, const Vec3& x) : n_(n), x_(x) {
    if (n != 2 && n != 3) throw DomainError("BallPoint: n must be 2 or 3");
    if (n == 2) x_[2] = 0.0;
    if (!(poisson::norm(x_) < 1.0)) throw DomainError("BallPoint: |x| must be < 1");
  }

  static BallPoint polar(double r, const SpherePoint& direction) {
    const Vec3 u = direction.cartesian();
    return BallPoint(direction.n, {r * u[0], r * u[1], r * u[2]});
  }

  int n() const { return n_; }
  const Vec3& x() const { return x_; }
  double radius() const { return poisson::norm(x_); }
  SpherePoint direction() const { return SpherePoint::from_cartesian(n_, x_); }
  double distance_from_origin() const { return 2.0 * std::atanh(radius()); }

  /// Conformal factor of the metric 4|dx|^2 / (1 - |x|^2)^2.
  double conformal_factor() const { return 2.0 / (1.0 - radius() * radius()); }

 private:
  int n_;
  Vec3 x_;
};

/// C_p = (2^p/n) Gamma(n-2p+1) Gamma(n/2+1) / (Gamma(n-p) Gamma(n/2-p+1)).
inline double cp_constant(int n, int p) {
  if (p < 1 || 2 * p > n) throw DomainError("cp_constant: requires 1 <= p <= n/2");
  const double h = 0.5 * n;
  return std::ldexp(1.0, p) / n *
         specfun::detail::gamma_ratio({n - 2.0 * p + 1.0, h + 1.0}, {static_cast<double>(n - p), h - p + 1.0});
}

/// c_{p,k} by its gamma-ratio and finite-product expressions.
struct CpkForms {
  double gamma_ratio = 0.0;
  double finite_product = 0.0;
};

inline CpkForms cpk_forms(int n, int p, int k) {
  if (k < 0) throw DomainError("cpk_constant: k must be >= 0");
  if (p < 0 || p >= n) throw DomainError("cpk_constant: requires 0 <= p < n");
  const double h = 0.5 * n;
  const double lead = std::ldexp(1.0, p + 1) / n;
  CpkForms out;
  out.gamma_ratio =
      lead * specfun::detail::gamma_ratio({static_cast<double>(n - p + k), h + 1.0}, {static_cast<double>(n - p), h + k + 1.0});
  double product = lead;
  for (int j = 0; j < k; ++j) product *= (n - p + j) / (h + 1.0 + j);
  out.finite_product = product;
  return out;
}

inline double cpk_constant(int n, int p, int k) {
  const CpkForms f = cpk_forms(n, p, k);
  if (std::abs(f.gamma_ratio - f.finite_product) > 1e-12 * std::abs(f.finite_product)) {
    throw ConvergenceError("cpk_constant: gamma-ratio and product forms disagree",
                           std::abs(f.gamma_ratio - f.finite_product));
  }
  return f.finite_product;
}

/// Radial coefficient functions of one level of Phi_p:
///   T(r) = r^{p+k} F_{p-1,k}(r^2) / (k+p)   (tangential, multiplies d alpha)
///   R(r) = r^{p-1+k} (1-r^2) F_{p,k}(r^2)   (radial, multiplies dr ^ alpha)
class TransformProfile {
 public:
  TransformProfile(int n, int p, int k) : n_(n), p_(p), k_(k) {
    if (p < 1 || 2 * p > n) throw DomainError("TransformProfile: requires 1 <= p <= n/2");
    if (k < 0) throw DomainError("TransformProfile: k must be >= 0");
    prefactor_ = 0.5 * (k + p) * (k + n - p) * cpk_constant(n, p, k);
    const double h = 0.5 * n;
    limit_ = specfun::detail::gamma_ratio({1.0 + h + k, 1.0 - 2.0 * p + n}, {1.0 - p + n + k, 1.0 - p + h}) / (k + p);
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int k() const { return k_; }
  double prefactor() const { return prefactor_; }

  /// lim_{r -> 1} T(r).
  double limit() const { return limit_; }

  double tangential(double r) const {
    check(r);
    if (r == 0.0) return 0.0;
    return std::pow(r, p_ + k_) * specfun::f_pk(n_, p_ - 1, k_, r * r) / (k_ + p_);
  }

  double radial(double r) const {
    check(r);
    if (r == 0.0) return p_ - 1 + k_ == 0 ? 1.0 : 0.0;
    return std::pow(r, p_ - 1 + k_) * (1.0 - r * r) * specfun::f_pk(n_, p_, k_, r * r);
  }

 private:
  static void check(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("TransformProfile: r must lie in [0, 1)");
  }

  int n_, p_, k_;
  double prefactor_ = 0.0;
  double limit_ = 0.0;
};

/// Radial factor of Phi_0 on the level-k scalar eigenfunction (k >= -1):
///   Gamma(n/2) Gamma(n+k) / (Gamma(n-1) Gamma(n/2+k+1)) r^{1+k} F(1-n/2, 1+k; 1+n/2+k; r^2),
/// and 1 for the constant mode. Tends to 1 as r -> 1.
inline double phi0_profile(int n, int k, double r) {
  if (k == -1) return 1.0;
  if (r == 0.0) return 0.0;
  const double h = 0.5 * n;
  const double coef = specfun::detail::gamma_ratio({h, static_cast<double>(n + k)}, {n - 1.0, h + k + 1.0});
  return coef * std::pow(r, 1 + k) * specfun::f_pk(n, 0, k, r * r);
}

/// Phi_0 f at x from the spectral expansion of f.
inline Complex phi0_spectral(const SpectralForm& f, const BallPoint& x) {
  if (f.p() != 0) throw DomainError("phi0_spectral: expects a degree-0 form");
  if (f.n() != x.n()) throw DomainError("phi0_spectral: dimension mismatch");
  const double r = x.radius();
  if (r == 0.0) {
    // Only the constant mode survives; beta_const = 1/sqrt(vol).
    return f.size() == 0 ? Complex{} : f[0] / std::sqrt(sphere::sphere_volume(f.n()));
  }
  const auto table = sphere::basis_table(f.n(), 0, f.kmax(), x.direction());
  std::vector<double> radial(static_cast<std::size_t>(f.kmax() + 2));
  for (int k = -1; k <= f.kmax(); ++k) radial[static_cast<std::size_t>(k + 1)] = phi0_profile(f.n(), k, r);
  Complex v{};
  for (std::size_t i = 0; i < table.size(); ++i) {
    v += f[i] * radial[static_cast<std::size_t>(f.mode(i).k + 1)] * table[i].alpha;
  }
  return v;
}

/// Hyperbolic Poisson kernel ((1 - |x|^2) / |x - zeta|^2)^{n-1}; averages to 1
/// against the normalised measure dsigma / vol(S^{n-1}).
inline double poisson_kernel(int n, const Vec3& x, const Vec3& zeta) {
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const Vec3 d{x[0] - zeta[0], x[1] - zeta[1], x[2] - zeta[2]};
  const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  return std::pow((1.0 - r2) / d2, n - 1);
}

/// Euclidean gradient in x of the kernel above.
inline Vec3 poisson_kernel_gradient(int n, const Vec3& x, const Vec3& zeta) {
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const Vec3 d{x[0] - zeta[0], x[1] - zeta[1], x[2] - zeta[2]};
  const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  const double k = std::pow((1.0 - r2) / d2, n - 1);
  Vec3 g{};
  for (int i = 0; i < 3; ++i) g[i] = k * (n - 1) * (-2.0 * x[i] / (1.0 - r2) - 2.0 * d[i] / d2);
  return g;
}

struct KernelResult {
  Complex value;
  bool resolution_warning = false;  // |x| > 0.9: kernel too peaked for the grid
};

/// Phi_0 f at x as the harmonic-measure integral of samples of f on a grid.
inline KernelResult phi0_kernel_oracle(const sphere::QuadratureGrid& grid, const std::vector<Complex>& samples,
                                       const BallPoint& x) {
  if (samples.size() != grid.size()) throw DomainError("phi0_kernel_oracle: sample count does not match grid");
  if (grid.n != x.n()) throw DomainError("phi0_kernel_oracle: dimension mismatch");
  Complex s{};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    s += grid.weights[j] * poisson_kernel(x.n(), x.x(), grid.nodes[j].cartesian()) * samples[j];
  }
  return {s / sphere::sphere_volume(x.n()), x.radius() > 0.9};
}

/// Value of a 1-form on the ball: `radial` multiplies dr, `angular` holds the
/// coefficients of the lifted unit-sphere coframe (d theta, sin theta d phi).
struct BallFormValue {
  Complex radial;
  sphere::FormValue angular;
};

/// Phi_1(omega) at x, per level: prefactor c_i [T(r) d alpha_i + R(r) dr ^ alpha_i].
inline BallFormValue phi_p(const SpectralForm& omega, const BallPoint& x) {
  if (omega.p() != 1) throw DomainError("phi_p: implemented for p = 1");
  if (omega.n() != x.n()) throw DomainError("phi_p: dimension mismatch");
  BallFormValue out;
  const double r = x.radius();
  if (r == 0.0) {
    // Levels k >= 1 vanish at the origin; level 0 needs a Cartesian frame.
    for (int idx = 0; idx < sphere::level_size(omega.n(), 1, 0) && omega.kmax() >= 0; ++idx) {
      if (omega.at({omega.n(), 1, 0, idx}) != Complex{}) {
        throw DomainError("phi_p: level-0 modes need a Cartesian frame at the origin");
      }
    }
    return out;
  }
  const auto table = sphere::basis_table(omega.n(), 1, omega.kmax(), x.direction());
  for (int k = 0; k <= omega.kmax(); ++k) {
    const TransformProfile prof(omega.n(), 1, k);
    const double t = prof.prefactor() * prof.tangential(r);
    const double rad = prof.prefactor() * prof.radial(r);
    for (int idx = 0; idx < sphere::level_size(omega.n(), 1, k); ++idx) {
      const std::size_t i = sphere::flat_index({omega.n(), 1, k, idx});
      out.angular += (omega[i] * t) * table[i].dalpha;
      out.radial += omega[i] * rad * table[i].alpha;
    }
  }
  return out;
}

/// Euclidean components (coefficients of dx_j) of a ball 1-form.
inline std::array<Complex, 3> cartesian_components(const BallFormValue& v, const BallPoint& x) {
  const SpherePoint d = x.direction();
  const double r = x.radius();
  std::array<Complex, 3> out{};
  if (x.n() == 2) {
    const double c = std::cos(d.theta), s = std::sin(d.theta);
    // dr = (c, s), d theta = (-s, c) / r
    out[0] = v.radial * c - v.angular.comp[0] * s / r;
    out[1] = v.radial * s + v.angular.comp[0] * c / r;
    return out;
  }
  const double st = std::sin(d.theta), ct = std::cos(d.theta);
  const double sp = std::sin(d.phi), cp = std::cos(d.phi);
  const Vec3 rhat{st * cp, st * sp, ct};
  const Vec3 that{ct * cp, ct * sp, -st};
  const Vec3 phat{-sp, cp, 0.0};
  for (int j = 0; j < 3; ++j) {
    out[j] = v.radial * rhat[j] + (v.angular.comp[0] * that[j] + v.angular.comp[1] * phat[j]) / r;
  }
  return out;
}

/// i_r^* Phi_p(omega) expressed in the same basis: c_i -> c_i prefactor_i T_i(r).
inline SpectralForm restrict_shell(const SpectralForm& omega, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("restrict_shell: r must lie in (0, 1)");
  SpectralForm out = omega;
  for (int k = 0; k <= omega.kmax(); ++k) {
    const TransformProfile prof(omega.n(), omega.p(), k);
    const double factor = prof.prefactor() * prof.tangential(r);
    for (int idx = 0; idx < sphere::level_size(omega.n(), omega.p(), k); ++idx) {
      out.at({omega.n(), omega.p(), k, idx}) *= factor;
    }
  }
  return out;
}

/// <i_r^* Phi_p(omega), eta> = sum conj(a_i) c_i prefactor_i T_i(r).
inline Complex shell_pairing(const SpectralForm& omega, const SpectralForm& eta, double r) {
  if (omega.n() != eta.n() || omega.p() != eta.p()) throw DomainError("shell_pairing: forms of different type");
  if (r == 0.0) return {};
  const SpectralForm shell = restrict_shell(omega, r);
  Complex s{};
  const std::size_t m = std::min(shell.size(), eta.size());
  for (std::size_t i = 0; i < m; ++i) s += shell[i] * std::conj(eta[i]);
  return s;
}

/// <omega, eta> = sum c_i conj(a_i).
inline Complex l2_pairing(const SpectralForm& omega, const SpectralForm& eta) {
  Complex s{};
  const std::size_t m = std::min(omega.size(), eta.size());
  for (std::size_t i = 0; i < m; ++i) s += omega[i] * std::conj(eta[i]);
  return s;
}

struct PairingRow {
  double r = 0.0;
  Complex pairing;
  Complex limit_reference;
  double abs_gap = 0.0;
};

/// Shell pairings on an r-grid (sorted ascending, duplicates removed) with
/// the reference C_p <omega, eta>.
inline std::vector<PairingRow> pairing_table(const SpectralForm& omega, const SpectralForm& eta, std::vector<double> rgrid) {
  std::sort(rgrid.begin(), rgrid.end());
  rgrid.erase(std::unique(rgrid.begin(), rgrid.end()), rgrid.end());
  const Complex reference = cp_constant(omega.n(), omega.p()) * l2_pairing(omega, eta);
  std::vector<PairingRow> rows(rgrid.size());
  parallel_for(rgrid.size(), [&](std::size_t i) {
    const Complex v = shell_pairing(omega, eta, rgrid[i]);
    rows[i] = {rgrid[i], v, reference, std::abs(v - reference)};
  });
  return rows;
}

/// r_j = 1 - 2^{-j}, j = 1..count.
inline std::vector<double> geometric_rgrid(int count) {
  if (count < 1 || count > 52) throw DomainError("geometric_rgrid: count must lie in [1, 52]");
  std::vector<double> r;
  for (int j = 1; j <= count; ++j) r.push_back(1.0 - std::ldexp(1.0, -j));
  return r;
}

struct BallNormReport {
  double closed_form = 0.0;
  double quadrature = 0.0;
  double relative_gap = 0.0;
  double quadrature_error_estimate = 0.0;  // |200-node - 100-node| radial rules
};

namespace detail {

/// Ball integral of |Phi_1(omega)|^2 dvol in the metric 4(dr^2 + r^2 dtheta^2)/(1-r^2)^2
/// on a tensor grid: Gauss-Legendre in u with r = tanh(u/2), u in [0, 36]
/// (the integrand decays like e^{-u}; tanh(u/2) rounds to 1 beyond ~38),
/// times equispaced theta. The form is scaled by sqrt(vol(S^1)), converting
/// coefficients from the dsigma/vol-orthonormal basis to ours.
inline double ball_norm_quadrature(const SpectralForm& omega, std::size_t radial_nodes) {
  const auto rule = quadrature::gauss_legendre(radial_nodes, 0.0, 36.0);
  const auto angles = sphere::grid_for_kmax(2, omega.kmax());
  const double vol = sphere::sphere_volume(2);
  std::vector<double> partial(rule.nodes.size(), 0.0);
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    const double u = rule.nodes[i];
    const double r = std::tanh(0.5 * u);
    const double sech = 1.0 / std::cosh(0.5 * u);
    const double one_minus_r2 = sech * sech;
    const double dr_du = 0.5 * one_minus_r2;
    const double rho = 2.0 / one_minus_r2;
    double ring = 0.0;
    for (std::size_t j = 0; j < angles.size(); ++j) {
      const auto v = phi_p(omega, BallPoint::polar(r, angles.nodes[j]));
      // |d theta|_E = 1/r; |.|_g^2 = rho^{-2} |.|_E^2; dvol_g = rho^2 r dr d theta.
      const double euclid = std::norm(v.radial) + std::norm(v.angular.comp[0]) / (r * r);
      const double pointwise = euclid / (rho * rho);
      const double volume = rho * rho * r;
      ring += angles.weights[j] * vol * pointwise * volume;
    }
    partial[i] = rule.weights[i] * ring * dr_du;
  });
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

}  // namespace detail

/// Ball L^2 norm squared of Phi_{n/2}(omega) at n = 2, by the closed form
/// 2^{n-2} vol(S^{n-1}) sum |c_i|^2 / (k_i + n/2) and by quadrature.
inline BallNormReport l2_ball_norm(const SpectralForm& omega) {
  if (omega.n() != 2 || omega.p() != 1) throw DomainError("l2_ball_norm: implemented for n = 2, p = 1");
  BallNormReport out;
  const double vol = sphere::sphere_volume(2);
  for (std::size_t i = 0; i < omega.size(); ++i) out.closed_form += vol * std::norm(omega[i]) / (omega.mode(i).k + 1.0);
  if (omega.norm_squared() == 0.0) return out;
  out.quadrature = detail::ball_norm_quadrature(omega, 200);
  out.quadrature_error_estimate = std::abs(out.quadrature - detail::ball_norm_quadrature(omega, 100));
  out.relative_gap = std::abs(out.quadrature - out.closed_form) / out.closed_form;
  return out;
}

struct GradientReport {
  double formula = 0.0;            // (n-1)^2 sum_j |mean(x_j f)|^2
  double finite_difference = 0.0;  // |grad Phi_0 f|^2 at 0, hyperbolic norm
};

/// |grad Phi_0 f|^2 at the origin, by the first-moment formula and by
/// central differences (step 1e-4) of phi0_spectral.
inline GradientReport gradient_at_origin(const SpectralForm& f) {
  if (f.p() != 0) throw DomainError("gradient_at_origin: expects a degree-0 form");
  const int n = f.n();
  GradientReport out;
  // First moments by quadrature of the synthesized function; exact for band-limited f.
  const auto grid = sphere::grid_for_kmax(n, f.kmax() + 1);
  const double vol = sphere::sphere_volume(n);
  std::array<Complex, 3> moment{};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Complex v = sphere::synthesize(f, grid.nodes[j]).comp[0];
    const Vec3 x = grid.nodes[j].cartesian();
    for (int c = 0; c < n; ++c) moment[static_cast<std::size_t>(c)] += grid.weights[j] * x[static_cast<std::size_t>(c)] * v;
  }
  for (int c = 0; c < n; ++c) out.formula += std::norm(moment[static_cast<std::size_t>(c)] / vol);
  out.formula *= (n - 1.0) * (n - 1.0);

  const double h = 1e-4;
  double euclid = 0.0;
  for (int c = 0; c < n; ++c) {
    Vec3 plus{}, minus{};
    plus[static_cast<std::size_t>(c)] = h;
    minus[static_cast<std::size_t>(c)] = -h;
    const Complex d = (phi0_spectral(f, BallPoint(n, plus)) - phi0_spectral(f, BallPoint(n, minus))) / (2.0 * h);
    euclid += std::norm(d);
  }
  const double rho0 = 2.0;
  out.finite_difference = euclid / (rho0 * rho0);
  return out;
}

struct ProfileReport {
  double max_derivative_residual = 0.0;  // max |central-difference dT/dr - R|
  int monotonicity_violations = 0;       // count of T(r_{j+1}) <= T(r_j)
  double prefactor_gap = 0.0;            // |prefactor L - C_p|
};

/// Checks dT/dr = R (step 1e-5), monotonicity of T and prefactor L = C_p on an r-grid.
inline ProfileReport profile_identity_checks(int n, int p, int k, std::vector<double> rgrid) {
  const TransformProfile prof(n, p, k);
  std::sort(rgrid.begin(), rgrid.end());
  ProfileReport out;
  const double h = 1e-5;
  double previous = -1.0;
  for (double r : rgrid) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("profile_identity_checks: r-grid must lie in (0, 1)");
    const double t = prof.tangential(r);
    if (t <= previous) ++out.monotonicity_violations;
    previous = t;
    if (r - h > 0.0 && r + h < 1.0) {
      const double dt = (prof.tangential(r + h) - prof.tangential(r - h)) / (2.0 * h);
      out.max_derivative_residual = std::max(out.max_derivative_residual, std::abs(dt - prof.radial(r)));
    }
  }
  out.prefactor_gap = std::abs(prof.prefactor() * prof.limit() - cp_constant(n, p));
  return out;
}

}  // namespace poisson_currents::poisson
