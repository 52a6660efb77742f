#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "poisson_currents/poisson.hpp"
#include "poisson_currents/rng.hpp"

namespace pn = poisson_currents::poisson;
namespace sp = poisson_currents::sphere;
namespace sf = poisson_currents::specfun;
using poisson_currents::DomainError;
using poisson_currents::Rng;
using pn::BallPoint;
using pn::Complex;

namespace {

sp::SpectralForm random_form(int n, int p, int kmax, Rng& rng) {
  sp::SpectralForm f(n, p, kmax);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.complex_unit_box();
  return f;
}

BallPoint random_ball_point(int n, double max_radius, Rng& rng) {
  while (true) {
    pn::Vec3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), n == 3 ? rng.uniform(-1, 1) : 0.0};
    if (pn::norm(x) <= 1.0) {
      for (double& c : x) c *= max_radius;
      return BallPoint(n, x);
    }
  }
}

const std::vector<std::pair<int, int>> kValidPairs = {{2, 1}, {3, 1}, {4, 1}, {4, 2}};

}  // namespace

TEST(Constants, CpExamples) {
  EXPECT_NEAR(pn::cp_constant(2, 1), 1.0, 1e-14);
  EXPECT_NEAR(pn::cp_constant(3, 1), 1.0, 1e-14);
  EXPECT_NEAR(pn::cp_constant(4, 2), 2.0, 1e-14);
  EXPECT_THROW(pn::cp_constant(3, 2), DomainError);
}

TEST(Constants, CpkExamplesAndForms) {
  EXPECT_NEAR(pn::cpk_constant(3, 1, 0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(pn::cpk_constant(3, 1, 1), 16.0 / 15.0, 1e-15);
  for (int k = 0; k <= 20; ++k) EXPECT_NEAR(pn::cpk_constant(2, 1, k), 2.0 / (k + 1.0), 1e-14);
  for (int n = 2; n <= 4; ++n) {
    for (int p = 0; p < n; ++p) {
      for (int k = 0; k <= 40; ++k) {
        const auto f = pn::cpk_forms(n, p, k);
        EXPECT_NEAR(f.gamma_ratio, f.finite_product, 1e-12 * f.finite_product);
      }
    }
  }
}

TEST(Profile, PrefactorTimesLimitIsCp) {
  for (const auto& [n, p] : kValidPairs) {
    for (int k = 0; k <= 20; ++k) {
      const pn::TransformProfile prof(n, p, k);
      EXPECT_NEAR(prof.prefactor() * prof.limit(), pn::cp_constant(n, p), 1e-10) << n << p << k;
      // L is the Gauss sum of F_{p-1,k} at 1, divided by k + p.
      const double gauss = sf::gauss_summation(p - 0.5 * n, p + k, 1.0 + 0.5 * n + k) / (k + p);
      EXPECT_NEAR(prof.limit(), gauss, 1e-13 * gauss);
    }
  }
  const pn::TransformProfile base(3, 1, 0);
  EXPECT_NEAR(base.limit(), 0.75, 1e-15);
  EXPECT_NEAR(base.prefactor(), 4.0 / 3.0, 1e-15);
}

TEST(Profile, TangentialApproachesLimit) {
  for (const auto& [n, p] : kValidPairs) {
    for (int k : {0, 3, 10}) {
      const pn::TransformProfile prof(n, p, k);
      const double near_one = prof.tangential(1.0 - std::ldexp(1.0, -20));
      EXPECT_NEAR(near_one, prof.limit(), 1e-4 * prof.limit());
    }
  }
}

TEST(Profile, CircleClosedForms) {
  // n = 2: T = r^{k+1}/(k+1), R = r^k.
  for (int k = 0; k <= 6; ++k) {
    const pn::TransformProfile prof(2, 1, k);
    for (double r : {0.1, 0.5, 0.9, 0.999}) {
      EXPECT_NEAR(prof.tangential(r), std::pow(r, k + 1) / (k + 1), 1e-14);
      EXPECT_NEAR(prof.radial(r), std::pow(r, k), 1e-13);
    }
  }
}

TEST(Profile, IdentityChecks) {
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
  for (const auto& [n, p] : kValidPairs) {
    for (int k = 0; k <= 10; ++k) {
      const auto rep = pn::profile_identity_checks(n, p, k, grid);
      EXPECT_EQ(rep.monotonicity_violations, 0) << n << p << k;
      EXPECT_LE(rep.max_derivative_residual, 1e-6) << n << p << k;
      EXPECT_LE(rep.prefactor_gap, 1e-10);
    }
  }
  EXPECT_THROW(pn::profile_identity_checks(3, 1, 0, {0.5, 1.0}), DomainError);
}

TEST(Phi0, CircleFirstMode) {
  sp::SpectralForm f(2, 0, 0);
  f.at({2, 0, 0, 0}) = std::sqrt(2.0 * sp::kPi);  // f = e^{i theta}
  for (double r : {0.0, 0.3, 0.8}) {
    const double t = 1.1;
    const Complex v = pn::phi0_spectral(f, BallPoint(2, {r * std::cos(t), r * std::sin(t), 0.0}));
    EXPECT_NEAR(std::abs(v - r * std::polar(1.0, t)), 0.0, 1e-14);
  }
}

TEST(Phi0, OriginIsMean) {
  Rng rng(1);
  for (int n : {2, 3}) {
    const auto f = random_form(n, 0, 5, rng);
    const auto grid = sp::grid_for_kmax(n, 5);
    Complex mean{};
    for (std::size_t j = 0; j < grid.size(); ++j) mean += grid.weights[j] * sp::synthesize(f, grid.nodes[j]).comp[0];
    mean /= sp::sphere_volume(n);
    EXPECT_NEAR(std::abs(pn::phi0_spectral(f, BallPoint(n, {0, 0, 0})) - mean), 0.0, 1e-13);
  }
}

TEST(Phi0, SphereDegreeOneProfile) {
  const double r = 0.6;
  const double expected = 4.0 / 3.0 * r * sf::gauss_2f1(-0.5, 1.0, 2.5, r * r);
  EXPECT_NEAR(pn::phi0_profile(3, 0, r), expected, 1e-15);
  EXPECT_NEAR(pn::phi0_profile(3, 0, 1.0 - 1e-12), 1.0, 1e-6);
  for (int n : {2, 3}) {
    for (int k = 0; k <= 8; ++k) EXPECT_NEAR(pn::phi0_profile(n, k, 1.0 - std::ldexp(1.0, -30)), 1.0, 1e-6);
  }
}

TEST(Phi0, KernelOracleAgreement) {
  Rng rng(2024);
  for (int n : {2, 3}) {
    const auto f = random_form(n, 0, 8, rng);
    const auto grid = sp::make_grid(n, n == 2 ? 400 : 200);
    std::vector<Complex> samples;
    for (const auto& node : grid.nodes) samples.push_back(sp::synthesize(f, node).comp[0]);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_ball_point(n, 0.7, rng);
      const auto oracle = pn::phi0_kernel_oracle(grid, samples, x);
      EXPECT_FALSE(oracle.resolution_warning);
      worst = std::max(worst, std::abs(oracle.value - pn::phi0_spectral(f, x)));
    }
    EXPECT_LE(worst, 1e-8) << n;
  }
}

TEST(Phi0, KernelOracleConstantsAndWarning) {
  const auto grid = sp::make_grid(3, 60);
  const std::vector<Complex> constant(grid.size(), Complex(2.0, -1.0));
  const auto v = pn::phi0_kernel_oracle(grid, constant, BallPoint(3, {0.2, -0.3, 0.1}));
  EXPECT_NEAR(std::abs(v.value - Complex(2.0, -1.0)), 0.0, 1e-12);
  EXPECT_TRUE(pn::phi0_kernel_oracle(grid, constant, BallPoint(3, {0.0, 0.0, 0.95})).resolution_warning);
}

TEST(PhiP, CircleSingleModeMatchesExplicitForm) {
  for (int k = 0; k <= 3; ++k) {
    sp::SpectralForm w(2, 1, k);
    w.at({2, 1, k, 1}) = 1.0;
    const double r = 0.55, theta = 2.2;
    const auto v = pn::phi_p(w, BallPoint::polar(r, {2, theta, 0.0}));
    const auto b = sp::eval_basis({2, 1, k, 1}, {2, theta, 0.0});
    EXPECT_NEAR(std::abs(v.angular.comp[0] - std::pow(r, k + 1) * b.dalpha.comp[0]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(v.radial - (k + 1.0) * std::pow(r, k) * b.alpha), 0.0, 1e-14);
  }
}

TEST(PhiP, VanishesAtOriginAboveLevelZero) {
  sp::SpectralForm w(3, 1, 3);
  w.at({3, 1, 2, 1}) = 1.0;
  const auto v = pn::phi_p(w, BallPoint(3, {0, 0, 0}));
  EXPECT_EQ(v.radial, Complex{});
  w.at({3, 1, 0, 0}) = 1.0;
  EXPECT_THROW(pn::phi_p(w, BallPoint(3, {0, 0, 0})), DomainError);
}

TEST(PhiP, ClosedAndCoclosed) {
  // d omega = 0: Euclidean curl vanishes. delta omega = 0 in the conformal metric:
  // sum_i d_i(rho^{n-2} omega_i) = 0.
  Rng rng(77);
  const double h = 1e-5;
  for (int n : {2, 3}) {
    const auto w = random_form(n, 1, 4, rng);
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_ball_point(n, 0.8, rng);
      if (x.radius() < 0.1) continue;
      auto field = [&](const pn::Vec3& y) {
        const BallPoint b(n, y);
        const double rho = b.conformal_factor();
        auto c = pn::cartesian_components(pn::phi_p(w, b), b);
        std::array<Complex, 3> weighted{};
        for (int j = 0; j < 3; ++j) weighted[j] = std::pow(rho, n - 2) * c[j];
        return std::make_pair(c, weighted);
      };
      std::array<std::array<Complex, 3>, 3> grad{};  // grad[i][j] = d_i omega_j
      Complex divergence{};
      double scale = 0.0;
      for (int i = 0; i < n; ++i) {
        pn::Vec3 plus = x.x(), minus = x.x();
        plus[i] += h;
        minus[i] -= h;
        const auto fp = field(plus), fm = field(minus);
        for (int j = 0; j < 3; ++j) {
          grad[i][j] = (fp.first[j] - fm.first[j]) / (2 * h);
          scale = std::max(scale, std::abs(grad[i][j]));
        }
        divergence += (fp.second[i] - fm.second[i]) / (2 * h);
      }
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) EXPECT_LE(std::abs(grad[i][j] - grad[j][i]), 1e-5 * std::max(1.0, scale));
      }
      EXPECT_LE(std::abs(divergence), 1e-5 * std::max(1.0, scale));
    }
  }
}

TEST(Shell, RestrictionExamples) {
  sp::SpectralForm w(3, 1, 2);
  w.at({3, 1, 0, 1}) = 1.0;
  for (double r : {0.2, 0.7, 0.99}) {
    const auto s = pn::restrict_shell(w, r);
    EXPECT_NEAR(std::real(s.at({3, 1, 0, 1})), 4.0 / 3.0 * r * sf::gauss_2f1(-0.5, 1.0, 2.5, r * r), 1e-14);
  }
  EXPECT_LT(std::abs(pn::restrict_shell(w, 1e-8).at({3, 1, 0, 1})), 2e-8);
  EXPECT_THROW(pn::restrict_shell(w, 1.0), DomainError);
}

TEST(Shell, PairingsConvergeToCpInnerProduct) {
  Rng rng(4);
  for (int n : {2, 3}) {
    const auto w = random_form(n, 1, 6, rng);
    const auto e = random_form(n, 1, 6, rng);
    const auto rows = pn::pairing_table(w, e, pn::geometric_rgrid(20));
    ASSERT_EQ(rows.size(), 20u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].abs_gap, rows[i - 1].abs_gap);
    EXPECT_LE(rows.back().abs_gap, 1e-4 * std::abs(rows.back().limit_reference));
    EXPECT_EQ(pn::shell_pairing(w, e, 0.0), Complex{});
  }
  // Disjoint modes pair to zero at every radius.
  sp::SpectralForm a(3, 1, 2), b(3, 1, 2);
  a.at({3, 1, 1, 0}) = 1.0;
  b.at({3, 1, 2, 3}) = 1.0;
  for (double r : {0.1, 0.5, 0.9}) EXPECT_EQ(pn::shell_pairing(a, b, r), Complex{});
}

TEST(Shell, PairingTableSortsInput) {
  Rng rng(8);
  const auto w = random_form(3, 1, 2, rng);
  auto grid = pn::geometric_rgrid(6);
  const auto forward = pn::pairing_table(w, w, grid);
  std::reverse(grid.begin(), grid.end());
  const auto backward = pn::pairing_table(w, w, grid);
  for (std::size_t i = 0; i < forward.size(); ++i) {
    EXPECT_EQ(forward[i].r, backward[i].r);
    EXPECT_EQ(forward[i].pairing, backward[i].pairing);
  }
}

TEST(BallNorm, ClosedFormAndQuadrature) {
  sp::SpectralForm single(2, 1, 0);
  single.at({2, 1, 0, 0}) = 1.0;
  const auto one = pn::l2_ball_norm(single);
  EXPECT_NEAR(one.closed_form, 2.0 * sp::kPi, 1e-14);
  EXPECT_LE(one.relative_gap, 1e-5);

  const auto zero = pn::l2_ball_norm(sp::SpectralForm(2, 1, 3));
  EXPECT_EQ(zero.closed_form, 0.0);
  EXPECT_EQ(zero.quadrature, 0.0);

  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const auto w = random_form(2, 1, 3, rng);
    const auto rep = pn::l2_ball_norm(w);
    EXPECT_LE(rep.relative_gap, 1e-5);
    EXPECT_LE(rep.quadrature_error_estimate, 1e-8 * rep.closed_form);
  }
  EXPECT_THROW(pn::l2_ball_norm(sp::SpectralForm(3, 1, 1)), DomainError);
}

TEST(BallNorm, PerModeScaling) {
  for (int k = 0; k <= 3; ++k) {
    sp::SpectralForm w(2, 1, k);
    w.at({2, 1, k, 0}) = 1.0;
    EXPECT_NEAR(pn::l2_ball_norm(w).quadrature, 2.0 * sp::kPi / (k + 1.0), 1e-6);
  }
}

TEST(Gradient, FirstCoordinateOnSphere) {
  const int kmax = 1;
  const auto grid = sp::grid_for_kmax(3, kmax);
  sp::SampledForm x1{3, 0, {}};
  for (const auto& node : grid.nodes) x1.values.push_back({{node.cartesian()[0], 0.0}});
  const auto f = sp::analyze(grid, x1, kmax);
  const auto rep = pn::gradient_at_origin(f);
  EXPECT_NEAR(rep.formula, 4.0 / 9.0, 1e-12);
  EXPECT_NEAR(rep.finite_difference, rep.formula, 1e-6);
}

TEST(Gradient, RandomAndConstant) {
  Rng rng(12);
  for (int n : {2, 3}) {
    const auto f = random_form(n, 0, 6, rng);
    const auto rep = pn::gradient_at_origin(f);
    EXPECT_NEAR(rep.finite_difference, rep.formula, 1e-6 * std::max(1.0, rep.formula));
    sp::SpectralForm c(n, 0, 3);
    c[0] = 5.0;
    EXPECT_NEAR(pn::gradient_at_origin(c).formula, 0.0, 1e-20);
  }
}
