#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "poisson_currents/error.hpp"

namespace poisson_currents::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `count` nodes on [-1, 1], exact for polynomials
/// of degree 2 count - 1. Nodes ascend.
inline Rule gauss_legendre(std::size_t count) {
  if (count == 0) throw DomainError("gauss_legendre: need at least one node");
  Rule rule;
  rule.nodes.assign(count, 0.0);
  rule.weights.assign(count, 0.0);
  const double n = static_cast<double>(count);
  for (std::size_t i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t j = 2; j <= count; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t j = 2; j <= count; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = count == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[count - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  return rule;
}

/// Gauss-Legendre rule mapped affinely onto [lo, hi].
inline Rule gauss_legendre(std::size_t count, double lo, double hi) {
  Rule rule = gauss_legendre(count);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < count; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

}  // namespace poisson_currents::quadrature
