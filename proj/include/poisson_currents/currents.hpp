#pragma once

// Pairings of invariant boundary currents: the H^{1/2} n L^inf algebra of the
// circle, the Fourier cyclic cocycle on it, the area pairing of a disk in the
// plane model of S^2, and checks of the Schottky current df on S^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "poisson_currents/error.hpp"
#include "poisson_currents/kleinian.hpp"
#include "poisson_currents/parallel.hpp"
#include "poisson_currents/poisson.hpp"
#include "poisson_currents/quadrature.hpp"
#include "poisson_currents/rng.hpp"
#include "poisson_currents/sphere.hpp"

namespace poisson_currents::currents {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using sphere::SpectralForm;

inline constexpr double kPi = 3.14159265358979323846;

/// f(theta) = sum_{|j| <= degree} c_j e^{i j theta}.
class TrigPolynomial {
 public:
  explicit TrigPolynomial(int degree = 0) : degree_(degree), c_(2 * degree + 1) {
    if (degree < 0) throw DomainError("TrigPolynomial: degree must be >= 0");
  }

  static TrigPolynomial constant(Complex v) {
    TrigPolynomial p(0);
    p[0] = v;
    return p;
  }

  static TrigPolynomial exponential(int j, Complex v = 1.0) {
    TrigPolynomial p(std::abs(j));
    p[j] = v;
    return p;
  }

  /// Coefficients uniform in the unit box for |j| <= degree.
  static TrigPolynomial random(Rng& rng, int degree) {
    TrigPolynomial p(degree);
    for (int j = -degree; j <= degree; ++j) p[j] = rng.complex_unit_box();
    return p;
  }

  /// A degree-0 form on S^1: c_j = a_i / sqrt(2 pi) for the mode of frequency j.
  static TrigPolynomial from_spectral(const SpectralForm& f) {
    if (f.n() != 2 || f.p() != 0) throw DomainError("TrigPolynomial: expects a degree-0 form on S^1");
    TrigPolynomial p(f.kmax() + 1);
    for (std::size_t i = 0; i < f.size(); ++i) p[sphere::azimuthal_order(f.mode(i))] += f[i] / std::sqrt(2.0 * kPi);
    return p;
  }

  SpectralForm to_spectral() const {
    SpectralForm f(2, 0, degree_ - 1);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = (*this)[sphere::azimuthal_order(f.mode(i))] * std::sqrt(2.0 * kPi);
    return f;
  }

  int degree() const { return degree_; }
  Complex& operator[](int j) { return c_.at(j + degree_); }
  Complex operator[](int j) const { return std::abs(j) > degree_ ? Complex{} : c_[j + degree_]; }

  Complex operator()(double theta) const {
    Complex s{};
    for (int j = -degree_; j <= degree_; ++j) s += c_[j + degree_] * std::polar(1.0, j * theta);
    return s;
  }

  /// Coefficient convolution; exact, degree adds.
  friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b) {
    TrigPolynomial out(a.degree_ + b.degree_);
    for (int i = -a.degree_; i <= a.degree_; ++i) {
      for (int j = -b.degree_; j <= b.degree_; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  /// Drops |j| > degree; returns the dropped l1 mass, which bounds the sup-norm change.
  double truncate(int degree) {
    if (degree >= degree_) return 0.0;
    double tail = 0.0;
    TrigPolynomial out(degree);
    for (int j = -degree_; j <= degree_; ++j) {
      if (std::abs(j) <= degree) {
        out[j] = (*this)[j];
      } else {
        tail += std::abs((*this)[j]);
      }
    }
    *this = out;
    return tail;
  }

  double l1_norm() const {
    double s = 0.0;
    for (const auto& c : c_) s += std::abs(c);
    return s;
  }

  /// sum |j| |c_j|^2.
  double half_weighted_energy() const {
    double s = 0.0;
    for (int j = -degree_; j <= degree_; ++j) s += std::abs(j) * std::norm((*this)[j]);
    return s;
  }

 private:
  int degree_;
  std::vector<Complex> c_;
};

// ---------------------------------------------------------------------------
// The H^{1/2} n L^inf norm.

inline constexpr double kHalfNormCutoff = 1e4;

struct HalfNormReport {
  double seminorm_sq_quadrature = 0.0;  // double integral over theta and h in (0, H], plus tail_estimate
  double seminorm_sq_closed = 0.0;      // 2 pi^2 sum |j| |c_j|^2
  double relative_gap = 0.0;
  double tail_estimate = 0.0;  // (2/H) int |f - mean f|^2, the h > H part to O(1/H^2)
  double tail_bound = 0.0;     // 8 pi ||f||_inf^2 / H, a bound on the whole h > H part
  double sup_norm = 0.0;
  double norm = 0.0;  // sqrt(seminorm_sq_quadrature) + sup_norm
};

/// Sup norm by sampling on 64 (degree + 1) points.
inline double sup_norm(const TrigPolynomial& f) {
  const int m = 64 * (f.degree() + 1);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s = std::max(s, std::abs(f(2.0 * kPi * i / m)));
  return s;
}

/// int_0^inf int_{S^1} |f(theta + h) - f(theta)|^2 / h^2 dtheta dh computed from
/// samples of f, cross-checked against 2 pi^2 sum |j| |c_j|^2.
inline HalfNormReport h_half_linf_norm(const TrigPolynomial& f, double cutoff = kHalfNormCutoff) {
  if (!(cutoff > 1.0)) throw DomainError("h_half_linf_norm: cutoff must exceed 1");
  HalfNormReport rep;
  const int D = f.degree();
  // Trapezoid in theta is exact for the degree-2D integrand with > 2D nodes.
  const int N = 4 * D + 8;
  const int J = 2 * D + 1;
  std::vector<Complex> wave(static_cast<std::size_t>(N) * J);  // e^{i j theta_m}
  std::vector<Complex> base(N);
  for (int m = 0; m < N; ++m) {
    const double theta = 2.0 * kPi * m / N;
    for (int j = -D; j <= D; ++j) wave[m * J + j + D] = std::polar(1.0, j * theta);
    base[m] = f(theta);
  }
  const double dtheta = 2.0 * kPi / N;
  // int |f(theta + h) - f(theta)|^2 dtheta from the shifted samples.
  const auto inner = [&](double h) {
    std::vector<Complex> shifted(J);
    const Complex step = std::polar(1.0, h);
    Complex e = std::polar(1.0, -D * h);
    for (int j = -D; j <= D; ++j, e *= step) shifted[j + D] = f[j] * e;
    double s = 0.0;
    for (int m = 0; m < N; ++m) {
      Complex v{};
      const Complex* row = &wave[m * J];
      for (int j = 0; j < J; ++j) v += shifted[j] * row[j];
      s += std::norm(v - base[m]);
    }
    return s * dtheta;
  };
  // Gauss-Legendre on unit panels: the integrand oscillates at frequencies <= D.
  const std::size_t panels = static_cast<std::size_t>(std::ceil(cutoff));
  const std::size_t order = static_cast<std::size_t>(std::max(16, 2 * D + 8));
  const auto rule = quadrature::gauss_legendre(order);
  std::vector<double> panel_sum(panels);
  parallel_for(panels, [&](std::size_t p) {
    const double lo = static_cast<double>(p), hi = std::min(cutoff, lo + 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double h = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
      s += rule.weights[i] * inner(h) / (h * h);
    }
    panel_sum[p] = 0.5 * (hi - lo) * s;
  });
  double integral = 0.0;
  for (double s : panel_sum) integral += s;
  Complex mean{};
  for (const auto& v : base) mean += v;
  mean /= static_cast<double>(N);
  double variance = 0.0;
  for (const auto& v : base) variance += std::norm(v - mean) * dtheta;
  rep.tail_estimate = 2.0 * variance / cutoff;
  rep.sup_norm = sup_norm(f);
  rep.tail_bound = 8.0 * kPi * rep.sup_norm * rep.sup_norm / cutoff;
  rep.seminorm_sq_quadrature = integral + rep.tail_estimate;
  rep.seminorm_sq_closed = 2.0 * kPi * kPi * f.half_weighted_energy();
  rep.relative_gap = rep.seminorm_sq_closed == 0.0
                         ? std::abs(rep.seminorm_sq_quadrature)
                         : std::abs(rep.seminorm_sq_quadrature - rep.seminorm_sq_closed) / rep.seminorm_sq_closed;
  rep.norm = std::sqrt(std::max(0.0, rep.seminorm_sq_quadrature)) + rep.sup_norm;
  return rep;
}

// ---------------------------------------------------------------------------
// The cyclic cocycle.

/// -2 pi i sum_j j c0_j c1_{-j}, summed as sum_{j>0} j (c0_j c1_{-j} - c0_{-j} c1_j)
/// so that swapping the arguments negates the result exactly.
inline Complex tau_bar(const TrigPolynomial& f0, const TrigPolynomial& f1) {
  Complex s{};
  const int D = std::min(f0.degree(), f1.degree());
  for (int j = 1; j <= D; ++j) s += static_cast<double>(j) * (f0[j] * f1[-j] - f0[-j] * f1[j]);
  return Complex(0.0, -2.0 * kPi) * s;
}

inline Complex tau_bar(const SpectralForm& f0, const SpectralForm& f1) {
  return tau_bar(TrigPolynomial::from_spectral(f0), TrigPolynomial::from_spectral(f1));
}

/// tau(f0 f1, f2) - tau(f0, f1 f2) + tau(f2 f0, f1).
inline Complex cocycle_defect(const TrigPolynomial& f0, const TrigPolynomial& f1, const TrigPolynomial& f2) {
  return tau_bar(f0 * f1, f2) - tau_bar(f0, f1 * f2) + tau_bar(f2 * f0, f1);
}

/// Cauchy-Schwarz bound 2 pi (sum |j||c0_j|^2)^{1/2} (sum |j||c1_j|^2)^{1/2}.
inline double tau_bar_bound(const TrigPolynomial& f0, const TrigPolynomial& f1) {
  return 2.0 * kPi * std::sqrt(f0.half_weighted_energy() * f1.half_weighted_energy());
}

// ---------------------------------------------------------------------------
// Area pairing in the plane model.

/// Polynomial sum a_{pq} x^p y^q in the plane coordinates w = x + i y.
class PlanePolynomial {
 public:
  struct Term {
    int px = 0;
    int py = 0;
    Complex coeff;
  };

  PlanePolynomial() = default;
  explicit PlanePolynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.px < 0 || t.py < 0) throw DomainError("PlanePolynomial: exponents must be >= 0");
    }
  }

  static PlanePolynomial x() { return PlanePolynomial({{1, 0, 1.0}}); }
  static PlanePolynomial y() { return PlanePolynomial({{0, 1, 1.0}}); }
  static PlanePolynomial constant(Complex v) { return PlanePolynomial({{0, 0, v}}); }

  /// Every monomial of total degree <= degree with a unit-box complex coefficient.
  static PlanePolynomial random(Rng& rng, int degree) {
    std::vector<Term> t;
    for (int d = 0; d <= degree; ++d) {
      for (int px = d; px >= 0; --px) t.push_back({px, d - px, rng.complex_unit_box()});
    }
    return PlanePolynomial(std::move(t));
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.px + t.py);
    return d;
  }

  const std::vector<Term>& terms() const { return terms_; }

  Complex operator()(double x, double y) const {
    Complex s{};
    for (const auto& t : terms_) s += t.coeff * std::pow(x, t.px) * std::pow(y, t.py);
    return s;
  }

  Complex dx(double x, double y) const {
    Complex s{};
    for (const auto& t : terms_) {
      if (t.px > 0) s += t.coeff * static_cast<double>(t.px) * std::pow(x, t.px - 1) * std::pow(y, t.py);
    }
    return s;
  }

  Complex dy(double x, double y) const {
    Complex s{};
    for (const auto& t : terms_) {
      if (t.py > 0) s += t.coeff * static_cast<double>(t.py) * std::pow(x, t.px) * std::pow(y, t.py - 1);
    }
    return s;
  }

 private:
  std::vector<Term> terms_;
};

/// Round disk |w - center| < radius of the plane model, oriented by dx ^ dy.
struct DiskRegion {
  Complex center{0.0, 0.0};
  double radius = 1.0;
};

struct AreaReport {
  Complex value;
  double quadrature_error = 0.0;  // gap to a rule with half the nodes
};

namespace detail {

inline Complex area_integral(const PlanePolynomial& F0, const PlanePolynomial& F1, const DiskRegion& region,
                             std::size_t radial, std::size_t angular) {
  const auto rule = quadrature::gauss_legendre(radial, 0.0, region.radius);
  Complex s{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rho = rule.nodes[i];
    Complex ring{};
    for (std::size_t a = 0; a < angular; ++a) {
      const double t = 2.0 * kPi * a / angular;
      const double x = region.center.real() + rho * std::cos(t), y = region.center.imag() + rho * std::sin(t);
      ring += F0.dx(x, y) * F1.dy(x, y) - F0.dy(x, y) * F1.dx(x, y);
    }
    s += rule.weights[i] * rho * ring * (2.0 * kPi / angular);
  }
  return s;
}

}  // namespace detail

/// -int_D dF0 ^ dF1 in polar coordinates about the disk centre.
inline AreaReport tau_area(const PlanePolynomial& F0, const PlanePolynomial& F1, const DiskRegion& region = {}) {
  if (!(region.radius > 0.0)) throw DomainError("tau_area: radius must be > 0");
  const int d = F0.degree() + F1.degree();
  const std::size_t radial = static_cast<std::size_t>(d + 8), angular = static_cast<std::size_t>(2 * d + 16);
  const Complex fine = -detail::area_integral(F0, F1, region, radial, angular);
  const Complex coarse = -detail::area_integral(F0, F1, region, radial / 2, angular / 2);
  return {fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Fuchsian comparison: D+ is the unit disk and the boundary map is the identity.

struct FuchsianCase {
  Complex tau;
  Complex tau_bar;
  double gap = 0.0;                 // |tau + tau_bar|
  double band_limit_residual = 0.0; // max |F|_{S^1} - synthesis| over the samples
};

/// tau_area over the unit disk against tau_bar of the restrictions to S^1,
/// which are analysed from samples into Fourier coefficients.
inline FuchsianCase fuchsian_comparison(const PlanePolynomial& F0, const PlanePolynomial& F1) {
  const int kmax = std::max(F0.degree(), F1.degree());
  const auto grid = sphere::grid_for_kmax(2, kmax);
  const auto restrict_to_circle = [&](const PlanePolynomial& F) {
    sphere::SampledForm s{2, 0, {}};
    for (const auto& node : grid.nodes) {
      sphere::FormValue v;
      v.comp[0] = F(std::cos(node.theta), std::sin(node.theta));
      s.values.push_back(v);
    }
    return s;
  };
  FuchsianCase out;
  const auto s0 = restrict_to_circle(F0), s1 = restrict_to_circle(F1);
  const auto f0 = sphere::analyze(grid, s0, kmax), f1 = sphere::analyze(grid, s1, kmax);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out.band_limit_residual = std::max({out.band_limit_residual,
                                        std::abs(sphere::synthesize(f0, grid.nodes[j]).comp[0] - s0.values[j].comp[0]),
                                        std::abs(sphere::synthesize(f1, grid.nodes[j]).comp[0] - s1.values[j].comp[0])});
  }
  out.tau = tau_area(F0, F1).value;
  out.tau_bar = tau_bar(f0, f1);
  out.gap = std::abs(out.tau + out.tau_bar);
  return out;
}

/// `count` random pairs of total degree <= max_degree, seeded.
inline std::vector<FuchsianCase> fuchsian_sweep(std::uint64_t seed, int count = 20, int max_degree = 4) {
  Rng rng(seed);
  std::vector<std::pair<PlanePolynomial, PlanePolynomial>> pairs;
  for (int c = 0; c < count; ++c) {
    const int d0 = rng.integer(1, max_degree), d1 = rng.integer(1, max_degree);
    auto F0 = PlanePolynomial::random(rng, d0);
    auto F1 = PlanePolynomial::random(rng, d1);
    pairs.emplace_back(std::move(F0), std::move(F1));
  }
  std::vector<FuchsianCase> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) { out[i] = fuchsian_comparison(pairs[i].first, pairs[i].second); });
  return out;
}

// ---------------------------------------------------------------------------
// The Schottky boundary current on S^2.

/// Coefficients of f = locally_constant_f on a grid; unresolved nodes count as
/// zero and their weight fraction is returned in `unresolved_weight`.
inline SpectralForm analyze_cocycle_function(const kleinian::SchottkyGroup& group, const sphere::QuadratureGrid& grid,
                                             int kmax, double* unresolved_weight = nullptr) {
  sphere::SampledForm s{group.n(), 0, std::vector<sphere::FormValue>(grid.size())};
  double missing = 0.0, total = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    total += grid.weights[j];
    const auto f = kleinian::locally_constant_f(group, grid.nodes[j].cartesian());
    if (f) {
      s.values[j].comp[0] = *f;
    } else {
      missing += grid.weights[j];
    }
  }
  if (missing / total >= kleinian::kMaxUnresolvedWeight) {
    throw BudgetError("analyze_cocycle_function: unresolved grid weight " + std::to_string(missing / total) +
                      " reaches the 1e-3 limit");
  }
  if (unresolved_weight) *unresolved_weight = missing / total;
  return sphere::analyze(grid, s, kmax);
}

/// The exact 1-form d b, b a smooth bump exp(1 - 1/(1 - (a/width)^2)) of the
/// angle a from `center`, band-limited to level kmax and scaled to unit L^2 norm.
inline SpectralForm bump_form(int n, const Vec3& center, double width, int kmax) {
  if (!(width > 0.0 && width < kPi)) throw DomainError("bump_form: width must lie in (0, pi)");
  const double len = poisson::norm(center);
  const auto grid = sphere::make_grid(n, 2 * kmax + 32);
  sphere::SampledForm s{n, 0, std::vector<sphere::FormValue>(grid.size())};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Vec3 x = grid.nodes[j].cartesian();
    const double c = std::clamp((x[0] * center[0] + x[1] * center[1] + x[2] * center[2]) / len, -1.0, 1.0);
    const double t = std::acos(c) / width;
    if (t < 1.0) s.values[j].comp[0] = std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  SpectralForm eta = sphere::differential(sphere::analyze(grid, s, kmax));
  const double norm = std::sqrt(eta.norm_squared());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] /= norm;
  return eta;
}

struct SupportRow {
  double r = 0.0;
  Complex pairing;
  double unresolved_weight = 0.0;
};

struct SupportReport {
  std::vector<SupportRow> rows;
  Complex limit;  // <df, eta>
  double unresolved_weight = 0.0;
};

/// <i_r^*(d Phi_0 f), eta> over an r-grid. With f = sum a_i beta_i, the shell
/// restriction of Phi_0 f is sum a_i phi0_profile_k(r) beta_i, whose
/// differential pairs with eta mode by mode.
inline SupportReport support_check(const kleinian::SchottkyGroup& group, const SpectralForm& eta,
                                   std::vector<double> rgrid, const sphere::QuadratureGrid& grid) {
  if (eta.n() != group.n() || eta.p() != 1) throw DomainError("support_check: eta must be a 1-form on the group's sphere");
  std::sort(rgrid.begin(), rgrid.end());
  rgrid.erase(std::unique(rgrid.begin(), rgrid.end()), rgrid.end());
  SupportReport rep;
  const SpectralForm f = analyze_cocycle_function(group, grid, eta.kmax(), &rep.unresolved_weight);
  rep.limit = poisson::l2_pairing(sphere::differential(f), eta);
  rep.rows.resize(rgrid.size());
  parallel_for(rgrid.size(), [&](std::size_t i) {
    const double r = rgrid[i];
    if (!(r > 0.0 && r < 1.0)) throw DomainError("support_check: r must lie in (0, 1)");
    SpectralForm shell = f;
    for (std::size_t m = 0; m < shell.size(); ++m) shell[m] *= poisson::phi0_profile(f.n(), shell.mode(m).k, r);
    rep.rows[i] = {r, poisson::l2_pairing(sphere::differential(shell), eta), rep.unresolved_weight};
  });
  return rep;
}

struct SobolevRow {
  int kmax = 0;
  double s = 0.0;
  double norm = 0.0;
};

struct SobolevTrend {
  std::vector<SobolevRow> rows;
  // Per s: ratio of the last two block increments of the squared partial norm
  // (levels in (k_{m-2}, k_{m-1}] and (k_{m-1}, k_m]). Over dyadic blocks a
  // tail decaying like K^{-beta} gives 2^{-beta}; a log-divergent sum gives 1.
  std::vector<double> increment_ratio;
  std::vector<double> last_relative_increment;  // last block / squared partial norm
  std::vector<bool> cauchy;   // ratio < 1 and last block <= kCauchyRelativeBlock of the total
  std::vector<bool> growing;  // ratio >= 1: block sums do not shrink
};

inline constexpr double kCauchyRelativeBlock = 0.05;

/// Partial H^s norms of df (f = locally_constant_f) truncated at each kmax.
inline SobolevTrend sobolev_diagnostic(const kleinian::SchottkyGroup& group, const std::vector<double>& s_values,
                                       std::vector<int> kmaxes, const sphere::QuadratureGrid& grid) {
  if (kmaxes.size() < 3) throw DomainError("sobolev_diagnostic: needs at least three truncations");
  std::sort(kmaxes.begin(), kmaxes.end());
  const SpectralForm df = sphere::differential(analyze_cocycle_function(group, grid, kmaxes.back()));
  SobolevTrend out;
  for (double s : s_values) {
    std::vector<double> sq;
    for (int k : kmaxes) {
      const double norm = sphere::sobolev_norm(df.resized(k), s);
      sq.push_back(norm * norm);
      out.rows.push_back({k, s, norm});
    }
    const std::size_t m = sq.size();
    const double last = sq[m - 1] - sq[m - 2], prev = sq[m - 2] - sq[m - 3];
    const double ratio = prev > 0.0 ? last / prev : 0.0;
    const double rel = sq[m - 1] > 0.0 ? last / sq[m - 1] : 0.0;
    out.increment_ratio.push_back(ratio);
    out.last_relative_increment.push_back(rel);
    out.cauchy.push_back(prev > 0.0 && ratio < 1.0 && rel <= kCauchyRelativeBlock);
    out.growing.push_back(prev > 0.0 && ratio >= 1.0);
  }
  return out;
}

}  // namespace poisson_currents::currents
