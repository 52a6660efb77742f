#pragma once

// Special functions: Gauss hypergeometric 2F1 on (-inf, 1], the F_{p,k}
// family used by the form Poisson transform, modified Bessel K and the
// Gegenbauer polynomials C_q^{3/2}.

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "poisson_currents/error.hpp"

namespace poisson_currents::specfun {

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_nonpositive_integer(double x) noexcept { return x <= 0.0 && x == std::floor(x); }

/// Parameters of F(a, b; c; z).
struct HypergeometricParams {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double z = 0.0;
};

namespace detail {

inline constexpr double kSeriesTolerance = 1e-16;
inline constexpr int kMaxSeriesTerms = 10000;
// Above this argument the series is re-expanded around z = 1.
inline constexpr double kConnectionThreshold = 0.9;

struct SignedLog {
  double log_abs;
  int sign;
};

inline SignedLog log_gamma(double x) {
  int sign = 1;
  const double l = boost::math::lgamma(x, &sign);
  return {l, sign};
}

/// prod Gamma(num) / prod Gamma(den), evaluated in log space. A pole in the
/// denominator makes the ratio vanish; a pole in the numerator is an error.
inline double gamma_ratio(std::initializer_list<double> num, std::initializer_list<double> den) {
  for (double d : den) {
    if (is_nonpositive_integer(d)) return 0.0;
  }
  double log_sum = 0.0;
  int sign = 1;
  for (double x : num) {
    if (is_nonpositive_integer(x)) {
      throw DomainError("gamma_ratio: pole of Gamma at " + std::to_string(x));
    }
    const auto g = log_gamma(x);
    log_sum += g.log_abs;
    sign *= g.sign;
  }
  for (double x : den) {
    const auto g = log_gamma(x);
    log_sum -= g.log_abs;
    sign *= g.sign;
  }
  return sign * std::exp(log_sum);
}

inline double direct_series(double a, double b, double c, double z) {
  double term = 1.0;
  double sum = 1.0;
  int quiet = 0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= kSeriesTolerance * std::abs(sum)) {
      if (++quiet == 2) return sum;
    } else {
      quiet = 0;
    }
  }
  throw ConvergenceError("2F1 series did not converge in 10000 terms", std::abs(term / sum));
}

/// Exact finite sum when a or b is a non-positive integer.
inline double terminating_series(double a, double b, double c, double z) {
  double degree = std::numeric_limits<double>::infinity();
  if (is_nonpositive_integer(a)) degree = -a;
  if (is_nonpositive_integer(b)) degree = std::min(degree, -b);
  const int terms = static_cast<int>(degree);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
  }
  return sum;
}

/// Expansion around z = 1 for c - a - b = m, a non-negative integer
/// (logarithmic case). Requires a, b, a + m, b + m off the poles.
inline double log_connection(double a, double b, double c, int m, double z) {
  const double w = 1.0 - z;
  double finite = 0.0;
  if (m > 0) {
    const double coef = gamma_ratio({c}, {a + m, b + m});
    // (a)_n (b)_n (m-n-1)! / n! (z-1)^n
    double poch = 1.0;
    double power = 1.0;
    for (int n = 0; n < m; ++n) {
      finite += coef * poch * std::tgamma(static_cast<double>(m - n)) * power;
      poch *= (a + n) * (b + n) / (n + 1.0);
      power *= (z - 1.0);
    }
  }
  const double pref = -gamma_ratio({c}, {a, b}) * std::pow(z - 1.0, m);
  if (pref == 0.0) return finite;

  const double log_w = std::log(w);
  double psi_1 = boost::math::digamma(1.0);
  double psi_m1 = boost::math::digamma(m + 1.0);
  double psi_a = boost::math::digamma(a + m);
  double psi_b = boost::math::digamma(b + m);
  // (a+m)_n (b+m)_n / (n! (n+m)!) w^n
  double coef = 1.0 / std::tgamma(m + 1.0);
  double sum = 0.0;
  int quiet = 0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double term = coef * (log_w - psi_1 - psi_m1 + psi_a + psi_b);
    sum += term;
    if (std::abs(term) <= kSeriesTolerance * std::abs(sum)) {
      if (++quiet == 2) return finite + pref * sum;
    } else {
      quiet = 0;
    }
    coef *= (a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0)) * w;
    psi_1 += 1.0 / (n + 1.0);
    psi_m1 += 1.0 / (n + m + 1.0);
    psi_a += 1.0 / (a + m + n);
    psi_b += 1.0 / (b + m + n);
  }
  throw ConvergenceError("2F1 logarithmic connection series did not converge", std::abs(coef));
}

}  // namespace detail

/// Gauss summation F(a, b; c; 1) for c - a - b > 0.
inline double gauss_summation(double a, double b, double c) {
  if (!(c - a - b > 0.0)) throw DomainError("gauss_summation: requires c - a - b > 0");
  if (is_nonpositive_integer(c)) throw DomainError("gauss_summation: c is a non-positive integer");
  return detail::gamma_ratio({c, c - a - b}, {c - a, c - b});
}

/// F(a, b; c; z) for z <= 1. Small arguments use the Taylor series,
/// negative ones the Pfaff transformation and z > 0.9 the expansion around
/// z = 1 (Euler-reflected to c - a - b >= 0 in the logarithmic cases).
inline double gauss_2f1(const HypergeometricParams& params) {
  const auto [a, b, c, z] = params;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z)) {
    throw DomainError("gauss_2f1: non-finite argument");
  }
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a non-positive integer");
  if (z > 1.0) throw DomainError("gauss_2f1: z > 1");
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;

  const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
  if (z == 1.0) {
    if (!(c - a - b > 0.0)) throw DomainError("gauss_2f1: z = 1 requires c - a - b > 0");
    return terminating ? detail::terminating_series(a, b, c, 1.0) : gauss_summation(a, b, c);
  }
  if (terminating) return detail::terminating_series(a, b, c, z);
  if (is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b)) {
    return std::pow(1.0 - z, c - a - b) * detail::terminating_series(c - a, c - b, c, z);
  }
  if (z < 0.0) {
    return std::pow(1.0 - z, -a) * gauss_2f1({a, c - b, c, z / (z - 1.0)});
  }
  if (z <= detail::kConnectionThreshold) return detail::direct_series(a, b, c, z);

  const double m = c - a - b;
  const double m_round = std::round(m);
  if (std::abs(m - m_round) < 1e-12) {
    const int mi = static_cast<int>(m_round);
    if (mi < 0) {
      return std::pow(1.0 - z, m) * detail::log_connection(c - a, c - b, c, -mi, z);
    }
    return detail::log_connection(a, b, c, mi, z);
  }
  const double w = 1.0 - z;
  const double first = detail::gamma_ratio({c, m}, {c - a, c - b});
  const double second = detail::gamma_ratio({c, -m}, {a, b});
  double value = 0.0;
  if (first != 0.0) value += first * detail::direct_series(a, b, 1.0 - m, w);
  if (second != 0.0) value += second * std::pow(w, m) * detail::direct_series(c - a, c - b, m + 1.0, w);
  return value;
}

inline double gauss_2f1(double a, double b, double c, double z) { return gauss_2f1({a, b, c, z}); }

/// F_{p,k}(z) = F(1 + p - n/2, 1 + p + k; 1 + n/2 + k; z) by its defining series.
inline double f_pk_direct(int n, int p, int k, double z) {
  const double h = 0.5 * n;
  return gauss_2f1(1.0 + p - h, 1.0 + p + k, 1.0 + h + k, z);
}

/// F_{p,k}(z) through the Euler transformation
/// (1 - z)^{n-1-2p} F(n + k - p, n/2 - p; 1 + n/2 + k; z), whose parameters
/// are nonnegative for p <= n/2.
inline double f_pk_transformed(int n, int p, int k, double z) {
  const double h = 0.5 * n;
  return std::pow(1.0 - z, n - 1 - 2 * p) * gauss_2f1(static_cast<double>(n + k - p), h - p, 1.0 + h + k, z);
}

/// F_{p,k}(z) for z in [0, 1). The transformed form is used above z = 1/2
/// whenever its prefactor exponent n - 1 - 2p is nonnegative.
inline double f_pk(int n, int p, int k, double z) {
  if (n < 2) throw DomainError("f_pk: n must be >= 2");
  if (k < 0) throw DomainError("f_pk: k must be >= 0");
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("f_pk: z must lie in [0, 1)");
  if (z > 0.5 && n - 1 - 2 * p >= 0) return f_pk_transformed(n, p, k, z);
  return f_pk_direct(n, p, k, z);
}

/// Modified Bessel function of the second kind K_order(t), t > 0.
inline double bessel_k(double order, double t) {
  if (!(t > 0.0)) throw DomainError("bessel_k: t must be positive");
  try {
    return boost::math::cyl_bessel_k(order, t);
  } catch (const std::overflow_error&) {
    throw DomainError("bessel_k: overflow for order " + std::to_string(order) + " at t = " + std::to_string(t));
  }
}

struct OracleResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double truncation = 0.0;  // upper end T of the t-integral
};

/// F_{p,k}((w-1)/(w+1)) from its Laplace-transform representation
///   sqrt(2/pi) 2^{n/2-p-1} Gamma(1+n/2+k) / (Gamma(k+p+1) Gamma(n+k-p)) (w+1)^{k+p+1}
///   * int_0^inf e^{-wt} t^{n/2+k-1/2} K_{n/2-p-1/2}(t) dt,
/// integrated by adaptive Gauss-Kronrod. Intended as an independent check of f_pk.
inline OracleResult f_pk_integral_oracle(int n, int p, int k, double w) {
  const double h = 0.5 * n;
  if (!(w > 1.0)) throw DomainError("f_pk_integral_oracle: w must exceed 1");
  if (h - p - 0.5 < -0.5) throw DomainError("f_pk_integral_oracle: requires p <= n/2");
  if (k < 0 || k > 30) throw DomainError("f_pk_integral_oracle: k must lie in [0, 30]");

  const double order = h - p - 0.5;
  const double power = h + k - 0.5;
  double upper = 1.0;
  while (-w * upper + (h + k) * std::log(upper) > std::log(1e-18) || upper < power / (w + 1.0)) {
    upper *= 2.0;
  }

  auto integrand = [&](double t) { return std::exp(-w * t + power * std::log(t)) * bessel_k(order, t); };
  // Dyadic panels toward t = 0 keep the logarithmic singularity of K_0 benign.
  // Depth is capped: K_nu carries ~1e-11 relative noise for small t, which
  // an uncapped refinement would chase forever.
  constexpr unsigned kMaxDepth = 4;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double integral = 0.0;
  double error = 0.0;
  double panel_error = 0.0;
  integral += Rule::integrate(integrand, 1.0, upper, kMaxDepth, 1e-12, &panel_error);
  error += panel_error;
  for (int j = 0; j < 60; ++j) {
    integral += Rule::integrate(integrand, std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j), kMaxDepth, 1e-12, &panel_error);
    error += panel_error;
  }
  if (!(error <= 1e-8 * std::abs(integral))) {
    throw ConvergenceError("f_pk_integral_oracle: Gauss-Kronrod did not converge", error);
  }

  const double log_pref = 0.5 * std::log(2.0 / kPi) + (h - p - 1.0) * std::log(2.0) +
                          detail::log_gamma(1.0 + h + k).log_abs - detail::log_gamma(k + p + 1.0).log_abs -
                          detail::log_gamma(static_cast<double>(n + k - p)).log_abs +
                          (k + p + 1.0) * std::log(w + 1.0);
  const double pref = std::exp(log_pref);
  return {pref * integral, pref * error, upper};
}

/// Gegenbauer polynomial C_q^{3/2}(u) by the three-term recurrence.
inline double gegenbauer_c32(int q, double u) {
  if (q < 0) throw DomainError("gegenbauer_c32: q must be >= 0");
  if (!(std::abs(u) <= 1.0)) throw DomainError("gegenbauer_c32: |u| must be <= 1");
  constexpr double lambda = 1.5;
  double prev = 1.0;
  if (q == 0) return prev;
  double cur = 2.0 * lambda * u;
  for (int j = 1; j < q; ++j) {
    const double next = (2.0 * (j + lambda) * u * cur - (j + 2.0 * lambda - 1.0) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace poisson_currents::specfun
