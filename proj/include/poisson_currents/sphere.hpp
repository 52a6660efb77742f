#pragma once

// Spectral description of exact p-forms (p = 1) and functions (p = 0) on the
// boundary sphere S^{n-1}, n in {2, 3}.
//
// A level-k mode of degree 1 is d alpha with alpha an eigenfunction of the
// sphere Laplacian with eigenvalue (k+1)(k+n-1), normalised so that
// ||d alpha||_{L^2} = 1 and ||alpha||^2 = 1 / ((k+1)(k+n-1)). Degree-0 modes
// are the orthonormal eigenfunctions beta themselves, with k >= -1 (k = -1
// is the constant). On S^1 the level-k eigenfunctions are e^{+-i(k+1)theta};
// on S^2 they are the complex spherical harmonics Y_l^m with l = k + 1
// (Condon-Shortley phase).
//
// 1-form values are given in the orthonormal angular coframe: (d theta) on
// S^1 and (d theta, sin theta d phi) on S^2.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "poisson_currents/error.hpp"
#include "poisson_currents/quadrature.hpp"

namespace poisson_currents::sphere {

using Complex = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

inline void check_supported(int n, int p) {
  if (n != 2 && n != 3) throw DomainError("unsupported dimension n = " + std::to_string(n) + " (need 2 or 3)");
  if (p != 0 && p != 1) throw DomainError("unsupported form degree p = " + std::to_string(p) + " (need 0 or 1)");
}

inline double sphere_volume(int n) {
  if (n == 2) return 2.0 * kPi;
  if (n == 3) return 4.0 * kPi;
  throw DomainError("sphere_volume: n must be 2 or 3");
}

/// Lowest level present in degree p.
inline int min_level(int p) { return p == 0 ? -1 : 0; }

struct Mode {
  int n = 3;
  int p = 1;
  int k = 0;
  int idx = 0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Number of modes at level k.
inline int level_size(int n, int p, int k) {
  if (k < min_level(p)) return 0;
  if (n == 2) return k == -1 ? 1 : 2;
  return 2 * (k + 1) + 1;
}

/// Laplace eigenvalue of alpha (p = 1) or beta (p = 0); both are (k+1)(k+n-1).
inline double eigenvalue(const Mode& m) {
  if (m.p == 0) return static_cast<double>(m.k + 1) * (m.k + m.n - 1);
  return static_cast<double>(m.k + m.p) * (m.k + m.n - m.p);
}

/// Azimuthal order: Fourier frequency on S^1, index m of Y_l^m on S^2.
inline int azimuthal_order(const Mode& mode) {
  if (mode.n == 2) {
    if (mode.k == -1) return 0;
    return mode.idx == 0 ? mode.k + 1 : -(mode.k + 1);
  }
  return mode.idx - (mode.k + 1);
}

inline std::size_t mode_count(int n, int p, int kmax) {
  std::size_t total = 0;
  for (int k = min_level(p); k <= kmax; ++k) total += static_cast<std::size_t>(level_size(n, p, k));
  return total;
}

inline std::size_t flat_index(const Mode& m) {
  if (m.idx < 0 || m.idx >= level_size(m.n, m.p, m.k)) throw DomainError("flat_index: invalid mode");
  if (m.n == 2) {
    if (m.p == 0) return m.k == -1 ? 0 : static_cast<std::size_t>(1 + 2 * m.k + m.idx);
    return static_cast<std::size_t>(2 * m.k + m.idx);
  }
  const int l = m.k + 1;
  if (m.p == 0) return static_cast<std::size_t>(l * l + m.idx);
  return static_cast<std::size_t>(l * l - 1 + m.idx);
}

inline Mode mode_at(int n, int p, std::size_t flat) {
  const int f = static_cast<int>(flat);
  if (n == 2) {
    if (p == 0) {
      if (f == 0) return {n, p, -1, 0};
      return {n, p, (f - 1) / 2, (f - 1) % 2};
    }
    return {n, p, f / 2, f % 2};
  }
  const int shifted = p == 0 ? f : f + 1;
  const int l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(shifted))));
  return {n, p, l - 1, shifted - l * l};
}

/// Point of S^{n-1}. For n = 2 `theta` is the angle; for n = 3 `theta` is
/// the polar angle from +e_3 and `phi` the azimuth.
struct SpherePoint {
  int n = 3;
  double theta = 0.0;
  double phi = 0.0;

  std::array<double, 3> cartesian() const {
    if (n == 2) return {std::cos(theta), std::sin(theta), 0.0};
    const double s = std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
  }

  static SpherePoint from_cartesian(int n, const std::array<double, 3>& x) {
    if (n == 2) return {2, std::atan2(x[1], x[0]), 0.0};
    const double rho = std::hypot(x[0], x[1]);
    return {3, std::atan2(rho, x[2]), std::atan2(x[1], x[0])};
  }
};

/// Components of a degree-p form at a point: one scalar for p = 0, n - 1
/// coframe components for p = 1.
struct FormValue {
  std::array<Complex, 2> comp{};

  FormValue& operator+=(const FormValue& o) {
    comp[0] += o.comp[0];
    comp[1] += o.comp[1];
    return *this;
  }
  friend FormValue operator*(Complex s, const FormValue& v) { return {{s * v.comp[0], s * v.comp[1]}}; }
};

inline int component_count(int n, int p) { return p == 0 ? 1 : n - 1; }

/// Pointwise Hermitian inner product <u, v> = sum u_j conj(v_j).
inline Complex dot(const FormValue& u, const FormValue& v, int components) {
  Complex s = u.comp[0] * std::conj(v.comp[0]);
  if (components > 1) s += u.comp[1] * std::conj(v.comp[1]);
  return s;
}

/// alpha_i and d alpha_i at a point (p = 1), or beta_i in `alpha` (p = 0).
struct BasisValue {
  Complex alpha;
  FormValue dalpha;
};

namespace detail {

/// Fully normalised associated Legendre values P[l][m] (so that
/// Y_l^m = P e^{i m phi}) and their theta-derivatives, 0 <= m <= l <= L.
struct LegendreTable {
  int lmax = 0;
  std::vector<double> value;
  std::vector<double> dtheta;

  static std::size_t at(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }

  LegendreTable(int L, double theta, bool with_derivative) : lmax(L) {
    const std::size_t size = static_cast<std::size_t>((L + 1) * (L + 2) / 2);
    value.assign(size, 0.0);
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    value[at(0, 0)] = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= L; ++m) {
      value[at(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * value[at(m - 1, m - 1)];
    }
    for (int m = 0; m < L; ++m) value[at(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * value[at(m, m)];
    for (int m = 0; m <= L; ++m) {
      for (int l = m + 2; l <= L; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
        const double a_prev =
            std::sqrt((4.0 * (l - 1) * (l - 1) - 1.0) / (static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m));
        value[at(l, m)] = a * (x * value[at(l - 1, m)] - value[at(l - 2, m)] / a_prev);
      }
    }
    if (!with_derivative) return;
    if (std::abs(s) < 1e-300) throw DomainError("angular frame is undefined at the poles");
    dtheta.assign(size, 0.0);
    for (int l = 0; l <= L; ++l) {
      for (int m = 0; m <= l; ++m) {
        double d = l * x * value[at(l, m)];
        if (l > m) {
          d -= std::sqrt((2.0 * l + 1.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m) / (2.0 * l - 1.0)) *
               value[at(l - 1, m)];
        }
        dtheta[at(l, m)] = d / s;
      }
    }
  }
};

}  // namespace detail

/// Values of every mode with level <= kmax at `point`, in flat order.
inline std::vector<BasisValue> basis_table(int n, int p, int kmax, const SpherePoint& point) {
  check_supported(n, p);
  if (kmax < min_level(p)) return {};
  std::vector<BasisValue> out(mode_count(n, p, kmax));
  if (n == 2) {
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    for (std::size_t f = 0; f < out.size(); ++f) {
      const Mode mode = mode_at(n, p, f);
      const int m = azimuthal_order(mode);
      const Complex e = std::polar(norm, m * point.theta);
      if (p == 0) {
        out[f].alpha = e;
        out[f].dalpha.comp[0] = Complex(0.0, m) * e;
      } else {
        const double scale = 1.0 / std::abs(m);
        out[f].alpha = scale * e;
        out[f].dalpha.comp[0] = Complex(0.0, m * scale) * e;
      }
    }
    return out;
  }
  const int L = kmax + 1;
  const bool grad = p == 1;
  const detail::LegendreTable table(L, point.theta, grad);
  const double s = std::sin(point.theta);
  for (std::size_t f = 0; f < out.size(); ++f) {
    const Mode mode = mode_at(n, p, f);
    const int l = mode.k + 1;
    const int m = azimuthal_order(mode);
    const int am = std::abs(m);
    // Y_l^{-m} = (-1)^m conj(Y_l^m)
    const double sign = (m < 0 && (am % 2) == 1) ? -1.0 : 1.0;
    const Complex phase = std::polar(1.0, m * point.phi);
    const Complex y = sign * table.value[detail::LegendreTable::at(l, am)] * phase;
    if (!grad) {
      out[f].alpha = y;
      continue;
    }
    const double inv_sqrt_lambda = 1.0 / std::sqrt(eigenvalue(mode));
    const Complex dy_theta = sign * table.dtheta[detail::LegendreTable::at(l, am)] * phase;
    const Complex dy_phi = Complex(0.0, m) * y / s;
    out[f].alpha = inv_sqrt_lambda * y;
    out[f].dalpha.comp[0] = inv_sqrt_lambda * dy_theta;
    out[f].dalpha.comp[1] = inv_sqrt_lambda * dy_phi;
  }
  return out;
}

/// alpha_i and d alpha_i for one mode.
inline BasisValue eval_basis(const Mode& mode, const SpherePoint& point) {
  check_supported(mode.n, mode.p);
  if (mode.k < min_level(mode.p) || mode.idx < 0 || mode.idx >= level_size(mode.n, mode.p, mode.k)) {
    throw DomainError("eval_basis: invalid mode");
  }
  return basis_table(mode.n, mode.p, mode.k, point)[flat_index(mode)];
}

/// Finite spectral expansion sum_i c_i d alpha_i (p = 1) or sum_i a_i beta_i
/// (p = 0) over all modes of level <= kmax.
class SpectralForm {
 public:
  SpectralForm(int n, int p, int kmax) : n_(n), p_(p), kmax_(kmax) {
    check_supported(n, p);
    if (kmax < min_level(p) - 1) throw DomainError("SpectralForm: kmax below lowest level");
    coeffs_.assign(mode_count(n, p, kmax), Complex{});
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int kmax() const { return kmax_; }
  std::size_t size() const { return coeffs_.size(); }

  Mode mode(std::size_t flat) const { return mode_at(n_, p_, flat); }

  Complex& operator[](std::size_t flat) { return coeffs_[flat]; }
  const Complex& operator[](std::size_t flat) const { return coeffs_[flat]; }

  Complex& at(const Mode& m) { return coeffs_.at(checked_index(m)); }
  const Complex& at(const Mode& m) const { return coeffs_.at(checked_index(m)); }

  const std::vector<Complex>& coefficients() const { return coeffs_; }

  /// Same coefficients, truncated or zero-padded to a new top level.
  SpectralForm resized(int kmax) const {
    SpectralForm out(n_, p_, kmax);
    for (std::size_t i = 0; i < std::min(out.size(), size()); ++i) out[i] = coeffs_[i];
    return out;
  }

  /// L^2 norm squared, sum |c_i|^2.
  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return s;
  }

 private:
  std::size_t checked_index(const Mode& m) const {
    if (m.n != n_ || m.p != p_ || m.k > kmax_) throw DomainError("SpectralForm: mode outside this form");
    return flat_index(m);
  }

  int n_;
  int p_;
  int kmax_;
  std::vector<Complex> coeffs_;
};

/// Nodes and positive weights on S^{n-1}. On S^1: equispaced; on S^2:
/// Gauss-Legendre in cos(theta) times equispaced azimuth.
struct QuadratureGrid {
  int n = 3;
  int exactness = 0;
  std::vector<SpherePoint> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Grid integrating every polynomial (trigonometric polynomial on S^1) of
/// degree <= exactness exactly.
inline QuadratureGrid make_grid(int n, int exactness) {
  if (exactness < 0) throw DomainError("make_grid: exactness must be >= 0");
  QuadratureGrid grid;
  grid.n = n;
  grid.exactness = exactness;
  const int azimuths = exactness + 1;
  if (n == 2) {
    for (int j = 0; j < azimuths; ++j) {
      grid.nodes.push_back({2, 2.0 * kPi * j / azimuths, 0.0});
      grid.weights.push_back(2.0 * kPi / azimuths);
    }
    return grid;
  }
  if (n != 3) throw DomainError("make_grid: n must be 2 or 3");
  const auto rule = quadrature::gauss_legendre(static_cast<std::size_t>(exactness / 2 + 1));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = std::acos(rule.nodes[i]);
    for (int j = 0; j < azimuths; ++j) {
      grid.nodes.push_back({3, theta, 2.0 * kPi * (j + 0.5) / azimuths});
      grid.weights.push_back(rule.weights[i] * 2.0 * kPi / azimuths);
    }
  }
  return grid;
}

/// Grid exact through degree 2 kmax + 4, enough for products of band-limited modes.
inline QuadratureGrid grid_for_kmax(int n, int kmax) { return make_grid(n, 2 * kmax + 4); }

/// A degree-p form sampled at the nodes of a grid.
struct SampledForm {
  int n = 3;
  int p = 1;
  std::vector<FormValue> values;
};

/// Coefficients <f, d alpha_i> (or <f, beta_i>) by quadrature.
inline SpectralForm analyze(const QuadratureGrid& grid, const SampledForm& f, int kmax) {
  check_supported(f.n, f.p);
  if (grid.n != f.n) throw DomainError("analyze: grid and form live on different spheres");
  if (f.values.size() != grid.size()) throw DomainError("analyze: sample count does not match grid");
  if (grid.exactness < 2 * kmax + 2) {
    throw DomainError("analyze: grid exactness " + std::to_string(grid.exactness) + " below 2 kmax + 2 = " +
                      std::to_string(2 * kmax + 2));
  }
  SpectralForm out(f.n, f.p, kmax);
  const int comps = component_count(f.n, f.p);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto table = basis_table(f.n, f.p, kmax, grid.nodes[j]);
    const double w = grid.weights[j];
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (f.p == 0) {
        out[i] += w * f.values[j].comp[0] * std::conj(table[i].alpha);
      } else {
        out[i] += w * dot(f.values[j], table[i].dalpha, comps);
      }
    }
  }
  return out;
}

/// sum_i c_i d alpha_i(point), or sum_i a_i beta_i(point) for p = 0.
inline FormValue synthesize(const SpectralForm& form, const SpherePoint& point) {
  FormValue v;
  if (form.size() == 0) return v;
  const auto table = basis_table(form.n(), form.p(), form.kmax(), point);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (form[i] == Complex{}) continue;
    if (form.p() == 0) {
      v.comp[0] += form[i] * table[i].alpha;
    } else {
      v += form[i] * table[i].dalpha;
    }
  }
  return v;
}

/// Samples of a spectral form on every node of a grid.
inline SampledForm sample(const SpectralForm& form, const QuadratureGrid& grid) {
  SampledForm out{form.n(), form.p(), {}};
  out.values.reserve(grid.size());
  for (const auto& node : grid.nodes) out.values.push_back(synthesize(form, node));
  return out;
}

/// Sobolev norm ( sum (1 + lambda_i)^s |c_i|^2 )^{1/2}. For large k the weight
/// behaves like k^{2s}, so finiteness at s = -p - eps is H^{-p-eps} regularity.
inline double sobolev_norm(const SpectralForm& form, double s) {
  double total = 0.0;
  for (std::size_t i = 0; i < form.size(); ++i) {
    const double weight = s == 0.0 ? 1.0 : std::pow(1.0 + eigenvalue(form.mode(i)), s);
    total += weight * std::norm(form[i]);
  }
  return std::sqrt(total);
}

/// Coefficients of df for f of degree 0: c_i = a_i sqrt(lambda_i), since
/// d beta_i = sqrt(lambda_i) d alpha_i. The constant mode drops out.
inline SpectralForm differential(const SpectralForm& f) {
  if (f.p() != 0) throw DomainError("differential: expects a degree-0 form");
  SpectralForm out(f.n(), 1, f.kmax());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Mode m = out.mode(i);
    out[i] = std::sqrt(eigenvalue(m)) * f.at({f.n(), 0, m.k, m.idx});
  }
  return out;
}

/// Quarter turn of a 1-form on S^2 (the Hodge star on 1-forms); carries
/// exact forms to coclosed ones.
inline FormValue hodge_star_s2(const FormValue& v) { return {{-v.comp[1], v.comp[0]}}; }

enum class ShellComponent { tangential, radial };

/// Ratio |.|_{S^{n-1}(r)} / |.|_{S^{n-1}} for d eta (tangential) and
/// dr ^ eta (radial) in the ball metric 4(dr^2 + r^2 dtheta^2)/(1-r^2)^2.
inline double shell_norm_factor(ShellComponent kind, int p, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("shell_norm_factor: r must lie in (0, 1)");
  const double scale = (1.0 - r * r) / (2.0 * r);
  if (kind == ShellComponent::tangential) return std::pow(scale, p);
  return 0.5 * (1.0 - r * r) * std::pow(scale, p - 1);
}

/// Pointwise norms on the shell of radius r from pointwise norms on the unit sphere.
inline std::vector<double> shell_pointwise_norm(ShellComponent kind, int p, const std::vector<double>& unit_sphere_norms,
                                                double r) {
  const double factor = shell_norm_factor(kind, p, r);
  std::vector<double> out(unit_sphere_norms.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * unit_sphere_norms[i];
  return out;
}

}  // namespace poisson_currents::sphere
