#pragma once

// Schottky groups acting on H^2 and H^3: free groups generated by isometries
// that pair disjoint round disks of the boundary (intervals when n = 2).
// Disks live in the plane model of mobius.hpp. Letters of a word are encoded
// as 2i for g_{i+1} and 2i + 1 for its inverse; a word w = l_1 ... l_m stands
// for the product g_{l_1} ... g_{l_m}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "poisson_currents/error.hpp"
#include "poisson_currents/mobius.hpp"
#include "poisson_currents/parallel.hpp"
#include "poisson_currents/poisson.hpp"
#include "poisson_currents/sphere.hpp"

namespace poisson_currents::kleinian {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using mobius::MobiusIsometry;
using mobius::PlanePoint;
using Word = std::vector<int>;

inline constexpr double kPi = 3.14159265358979323846;

inline int inverse_letter(int letter) { return letter ^ 1; }

/// "g1*g2^-1"; the empty word prints as "e".
inline std::string word_text(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '*';
    s += 'g' + std::to_string(w[i] / 2 + 1);
    if (w[i] & 1) s += "^-1";
  }
  return s;
}

/// Free reduction of u v.
inline Word multiply_words(const Word& u, const Word& v) {
  Word out = u;
  for (int l : v) {
    if (!out.empty() && out.back() == inverse_letter(l)) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

inline Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& l : out) l = inverse_letter(l);
  return out;
}

inline bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] == inverse_letter(w[i - 1])) return false;
  }
  return true;
}

/// Round disk |w - center| <= radius of the plane model (a real interval for n = 2).
struct Disk {
  Complex center;
  double radius = 0.0;

  bool contains(const PlanePoint& p) const { return !p.infinite && std::abs(p.w - center) < radius; }

  /// Interval of R whose Cayley image is the arc of half-width `half_width`
  /// centred at angle `theta` on the unit circle; the arc must avoid angle 0.
  static Disk from_arc(double theta, double half_width) {
    const double t0 = -1.0 / std::tan(0.5 * (theta - half_width));
    const double t1 = -1.0 / std::tan(0.5 * (theta + half_width));
    return {Complex(0.5 * (t0 + t1), 0.0), 0.5 * std::abs(t1 - t0)};
  }
};

struct DiskPair {
  Disk minus;
  Disk plus;
};

/// The isometry z -> c+ - r+ r- / (z - c-): it maps the circle of `minus`
/// onto the circle of `plus` and the exterior of `minus` onto the interior of `plus`.
inline MobiusIsometry pairing_generator(int n, const DiskPair& pair) {
  const Complex cm = pair.minus.center, cp = pair.plus.center;
  const double rr = pair.minus.radius * pair.plus.radius;
  return MobiusIsometry(n, cp, -cp * cm - rr, 1.0, -cm);
}

class SchottkyGroup {
 public:
  SchottkyGroup(int n, std::vector<DiskPair> disks, std::vector<Complex> cocycle)
      : n_(n), disks_(std::move(disks)), cocycle_(std::move(cocycle)) {
    if (n != 2 && n != 3) throw DomainError("SchottkyGroup: n must be 2 or 3");
    if (disks_.empty()) throw DomainError("SchottkyGroup: rank must be >= 1");
    if (cocycle_.empty()) cocycle_.assign(disks_.size(), Complex{});
    if (cocycle_.size() != disks_.size()) throw DomainError("SchottkyGroup: one cocycle value per generator");
    std::vector<Disk> all;
    for (const auto& d : disks_) {
      for (const Disk& disk : {d.minus, d.plus}) {
        if (!(disk.radius > 0.0) || !std::isfinite(disk.radius)) throw DomainError("SchottkyGroup: radius must be > 0");
        if (n == 2 && disk.center.imag() != 0.0) throw DomainError("SchottkyGroup: n = 2 disks are real intervals");
        all.push_back(disk);
      }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (std::abs(all[i].center - all[j].center) < all[i].radius + all[j].radius + kDisjointMargin) {
          throw DomainError("SchottkyGroup: disks " + std::to_string(i) + " and " + std::to_string(j) +
                            " are not disjoint");
        }
      }
    }
    for (const auto& d : disks_) {
      gens_.push_back(pairing_generator(n, d));
      inverses_.push_back(gens_.back().inverse());
    }
    validate_pairing();
  }

  int n() const { return n_; }
  int rank() const { return static_cast<int>(disks_.size()); }
  const std::vector<DiskPair>& disks() const { return disks_; }
  const std::vector<Complex>& cocycle() const { return cocycle_; }
  const MobiusIsometry& generator(int i) const { return gens_.at(i); }

  const MobiusIsometry& letter(int l) const { return (l & 1) ? inverses_.at(l / 2) : gens_.at(l / 2); }

  /// Disk into which letter l maps the complement of its source disk.
  const Disk& image_disk(int l) const { return (l & 1) ? disks_.at(l / 2).minus : disks_.at(l / 2).plus; }

  MobiusIsometry element(const Word& w) const {
    MobiusIsometry g = MobiusIsometry::identity(n_);
    for (int l : w) g = g * letter(l);
    return g;
  }

  /// c extended additively, with c(g^-1) = -c(g).
  Complex cocycle_value(const Word& w) const {
    Complex s{};
    for (int l : w) s += (l & 1) ? -cocycle_[l / 2] : cocycle_[l / 2];
    return s;
  }

  SchottkyGroup with_cocycle(std::vector<Complex> c) const { return SchottkyGroup(n_, disks_, std::move(c)); }

  static constexpr double kDisjointMargin = 1e-6;
  static constexpr double kPairingTolerance = 1e-8;

 private:
  void validate_pairing() const {
    constexpr int kSamples = 64;
    for (std::size_t i = 0; i < disks_.size(); ++i) {
      const Disk& m = disks_[i].minus;
      const Disk& p = disks_[i].plus;
      const int count = n_ == 2 ? 2 : kSamples;
      for (int s = 0; s < count; ++s) {
        const double a = n_ == 2 ? kPi * s : 2.0 * kPi * s / count;
        const Complex on_circle = m.center + m.radius * Complex(std::cos(a), std::sin(a));
        const PlanePoint img = gens_[i].apply_plane({on_circle, false});
        const double gap = img.infinite ? 1.0 : std::abs(std::abs(img.w - p.center) - p.radius);
        if (!(gap <= kPairingTolerance * std::max(1.0, p.radius))) {
          throw DomainError("SchottkyGroup: generator " + std::to_string(i + 1) + " does not pair its disks");
        }
      }
      // Exterior goes to interior: a far point of the exterior lands inside.
      if (!p.contains(gens_[i].apply_plane(PlanePoint::at_infinity()))) {
        throw DomainError("SchottkyGroup: generator " + std::to_string(i + 1) + " has the wrong orientation");
      }
    }
  }

  int n_;
  std::vector<DiskPair> disks_;
  std::vector<Complex> cocycle_;
  std::vector<MobiusIsometry> gens_;
  std::vector<MobiusIsometry> inverses_;
};

/// Rank-2 group used by examples and tests. n = 3: disks of radius `radius`
/// (default 0.6) centred at -+1.6 and -+1.6 i. n = 2: arcs of half-width
/// `radius` (default 0.4) centred at angles -+3 pi/4 and -+pi/4.
inline SchottkyGroup example_group(int n, double radius = 0.0, std::vector<Complex> cocycle = {1.0, 0.0}) {
  if (radius <= 0.0) radius = n == 3 ? 0.6 : 0.4;
  if (n == 3) {
    return SchottkyGroup(3,
                         {{{Complex(-1.6, 0.0), radius}, {Complex(1.6, 0.0), radius}},
                          {{Complex(0.0, -1.6), radius}, {Complex(0.0, 1.6), radius}}},
                         std::move(cocycle));
  }
  return SchottkyGroup(2,
                       {{Disk::from_arc(-0.75 * kPi, radius), Disk::from_arc(0.75 * kPi, radius)},
                        {Disk::from_arc(-0.25 * kPi, radius), Disk::from_arc(0.25 * kPi, radius)}},
                       std::move(cocycle));
}

/// Cyclic group on the first pair of example_group.
inline SchottkyGroup example_cyclic_group(int n, double radius = 0.0) {
  const auto g = example_group(n, radius);
  return SchottkyGroup(n, {g.disks()[0]}, {1.0});
}

// ---------------------------------------------------------------------------
// Orbit enumeration.

struct OrbitEntry {
  Word word;
  MobiusIsometry element;
  double displacement = 0.0;
};

/// Reduced words up to a length, in breadth-first lexicographic order (letter
/// order g1 < g1^-1 < g2 < ...). Nodes store their parent index and last letter.
class Orbit {
 public:
  std::size_t size() const { return nodes_.size(); }
  int max_len() const { return static_cast<int>(level_start_.size()) - 2; }

  /// First index of words of length L; level_begin(L + 1) ends the level.
  std::size_t level_begin(int len) const { return level_start_.at(len); }

  int length(std::size_t i) const { return nodes_.at(i).length; }
  double displacement(std::size_t i) const { return nodes_.at(i).displacement; }
  const MobiusIsometry& element(std::size_t i) const { return nodes_.at(i).element; }

  Word word(std::size_t i) const {
    Word w(nodes_.at(i).length);
    for (std::size_t j = i; nodes_[j].length > 0; j = nodes_[j].parent) w[nodes_[j].length - 1] = nodes_[j].letter;
    return w;
  }

  OrbitEntry entry(std::size_t i) const { return {word(i), element(i), displacement(i)}; }

 private:
  struct Node {
    std::uint32_t parent;
    std::int16_t letter;
    std::int16_t length;
    double displacement;
    MobiusIsometry element;
  };

  friend Orbit enumerate_orbit(const SchottkyGroup&, int, std::size_t);

  std::vector<Node> nodes_;
  std::vector<std::size_t> level_start_;
};

inline constexpr std::size_t kDefaultOrbitBudget = 2'000'000;
inline constexpr int kMaxWordLength = 20;

/// Number of reduced words of length L in the free group of rank r.
inline double reduced_word_count(int rank, int len) {
  return len == 0 ? 1.0 : 2.0 * rank * std::pow(2.0 * rank - 1.0, len - 1);
}

inline Orbit enumerate_orbit(const SchottkyGroup& group, int max_len, std::size_t budget = kDefaultOrbitBudget) {
  if (max_len < 0 || max_len > kMaxWordLength) throw DomainError("enumerate_orbit: max_len must be in [0, 20]");
  const int r = group.rank();
  double total = 0.0;
  for (int L = 0; L <= max_len; ++L) total += reduced_word_count(r, L);
  if (total > static_cast<double>(budget)) {
    throw BudgetError("enumerate_orbit: " + std::to_string(static_cast<long long>(total)) +
                      " words exceed the budget of " + std::to_string(budget));
  }
  Orbit orbit;
  orbit.nodes_.reserve(static_cast<std::size_t>(total));
  orbit.level_start_.push_back(0);
  orbit.nodes_.push_back({0, -1, 0, 0.0, MobiusIsometry::identity(group.n())});
  orbit.level_start_.push_back(1);
  for (int L = 1; L <= max_len; ++L) {
    const std::size_t lo = orbit.level_start_[L - 1], hi = orbit.level_start_[L];
    const std::size_t fan = L == 1 ? 2 * r : 2 * r - 1;
    const std::size_t base = orbit.nodes_.size();
    orbit.nodes_.resize(base + (hi - lo) * fan, orbit.nodes_[0]);
    // Child slot = parent offset * fan + rank among its children, so the merge
    // order never depends on how parents are split across workers.
    parallel_for(hi - lo, [&](std::size_t j) {
      const auto& parent = orbit.nodes_[lo + j];
      std::size_t rank = 0;
      for (int l = 0; l < 2 * r; ++l) {
        if (parent.length > 0 && l == inverse_letter(parent.letter)) continue;
        const MobiusIsometry g = parent.element * group.letter(l);
        orbit.nodes_[base + j * fan + rank++] = {static_cast<std::uint32_t>(lo + j), static_cast<std::int16_t>(l),
                                                  static_cast<std::int16_t>(L), g.displacement(), g};
      }
    });
    orbit.level_start_.push_back(orbit.nodes_.size());
  }
  return orbit;
}

// ---------------------------------------------------------------------------
// Poincare series and growth rate.

struct PoincareRow {
  int length = 0;
  double increment = 0.0;    // sum over words of exactly this length
  double partial_sum = 0.0;  // sum over words of length <= this length
};

inline std::vector<PoincareRow> poincare_partial_sums(const Orbit& orbit, double s) {
  if (!(s > 0.0)) throw DomainError("poincare_partial_sums: s must be > 0");
  std::vector<PoincareRow> rows;
  double sum = 0.0;
  for (int L = 0; L <= orbit.max_len(); ++L) {
    double inc = 0.0;
    for (std::size_t i = orbit.level_begin(L); i < orbit.level_begin(L + 1); ++i) {
      inc += std::exp(-s * orbit.displacement(i));
    }
    sum += inc;
    rows.push_back({L, inc, sum});
  }
  return rows;
}

inline std::vector<PoincareRow> poincare_partial_sums(const SchottkyGroup& group, double s, int max_len) {
  return poincare_partial_sums(enumerate_orbit(group, max_len), s);
}

struct ExponentEstimate {
  double value = 0.0;
  // |slope - log N(R_hi) / R_hi|: gap between the local slope and the global
  // growth rate over the fitted window, a proxy for pre-asymptotic bias.
  double half_width = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  bool degenerate = false;
};

/// Least-squares slope of log N(R), N(R) = #{|w| <= max_len : d(0, w 0) <= R},
/// over [R_hi / 2, R_hi], where R_hi is the smallest displacement at the
/// longest length, so that N is complete on the window.
inline ExponentEstimate critical_exponent_estimate(const Orbit& orbit) {
  if (orbit.max_len() < 6) throw DomainError("critical_exponent_estimate: max_len must be >= 6");
  const int L = orbit.max_len();
  ExponentEstimate est;
  est.r_hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = orbit.level_begin(L); i < orbit.level_begin(L + 1); ++i) {
    est.r_hi = std::min(est.r_hi, orbit.displacement(i));
  }
  est.r_lo = 0.5 * est.r_hi;
  std::vector<double> d;
  d.reserve(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) d.push_back(orbit.displacement(i));
  std::sort(d.begin(), d.end());
  constexpr int kSamples = 64;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int j = 0; j < kSamples; ++j) {
    const double R = est.r_lo + (est.r_hi - est.r_lo) * j / (kSamples - 1);
    const double y = std::log(static_cast<double>(std::upper_bound(d.begin(), d.end(), R) - d.begin()));
    sx += R;
    sy += y;
    sxx += R * R;
    sxy += R * y;
  }
  const double det = kSamples * sxx - sx * sx;
  const double n_hi = static_cast<double>(std::upper_bound(d.begin(), d.end(), est.r_hi) - d.begin());
  const double n_lo = static_cast<double>(std::upper_bound(d.begin(), d.end(), est.r_lo) - d.begin());
  est.degenerate = !(est.r_hi > 0.0) || !(det > 0.0) || n_hi - n_lo < 3.0;
  if (est.degenerate) return est;
  est.value = (kSamples * sxy - sx * sy) / det;
  est.half_width = std::abs(est.value - std::log(n_hi) / est.r_hi);
  return est;
}

inline ExponentEstimate critical_exponent_estimate(const SchottkyGroup& group, int max_len) {
  if (max_len < 6) throw DomainError("critical_exponent_estimate: max_len must be >= 6");
  return critical_exponent_estimate(enumerate_orbit(group, max_len));
}

// ---------------------------------------------------------------------------
// Components of the domain of discontinuity.

inline constexpr int kDefaultResolveSteps = 64;

// Pulling a point out of a disk expands the chordal metric. Once the product
// of expansions passes this bound, rounding in the input (~1e-16) has grown to
// ~1e-6 and the recorded word is no longer trustworthy: a floating-point copy
// of a limit point would otherwise drift into some component.
inline constexpr double kMaxResolveExpansion = 1e10;

/// Word w with zeta = w(eta), eta in the closed base region (complement of the
/// open disks). nullopt when zeta is within numerical reach of the limit set:
/// more than max_steps pulls, or expansion beyond kMaxResolveExpansion.
inline std::optional<Word> resolve_component(const SchottkyGroup& group, const PlanePoint& zeta,
                                             int max_steps = kDefaultResolveSteps) {
  Word w;
  PlanePoint p = zeta;
  double expansion = 1.0;
  for (int step = 0;; ++step) {
    int hit = -1;
    for (int l = 0; l < 2 * group.rank(); ++l) {
      if (group.image_disk(l).contains(p)) {
        hit = l;
        break;
      }
    }
    if (hit < 0) return w;
    if (step == max_steps) return std::nullopt;
    const MobiusIsometry& g = group.letter(inverse_letter(hit));
    // Chordal derivative (1 + |z|^2) / (|a z + b|^2 + |c z + d|^2).
    expansion *= (1.0 + std::norm(p.w)) / (std::norm(g.a() * p.w + g.b()) + std::norm(g.c() * p.w + g.d()));
    if (expansion > kMaxResolveExpansion) return std::nullopt;
    p = g.apply_plane(p);
    w.push_back(hit);
  }
}

inline std::optional<Word> resolve_component(const SchottkyGroup& group, const Vec3& zeta,
                                             int max_steps = kDefaultResolveSteps) {
  return resolve_component(group, mobius::plane_from_sphere(group.n(), zeta), max_steps);
}

/// f(zeta) = c(w) for zeta in the component w(base region); f - g.f = c(g).
inline std::optional<Complex> locally_constant_f(const SchottkyGroup& group, const PlanePoint& zeta,
                                                 int max_steps = kDefaultResolveSteps) {
  const auto w = resolve_component(group, zeta, max_steps);
  if (!w) return std::nullopt;
  return group.cocycle_value(*w);
}

inline std::optional<Complex> locally_constant_f(const SchottkyGroup& group, const Vec3& zeta,
                                                 int max_steps = kDefaultResolveSteps) {
  return locally_constant_f(group, mobius::plane_from_sphere(group.n(), zeta), max_steps);
}

/// Fixed point of g that attracts under iteration (a point of the limit set).
inline PlanePoint attracting_fixed_point(const MobiusIsometry& g) {
  const Complex a = g.a(), b = g.b(), c = g.c(), d = g.d();
  if (std::abs(c) < 1e-300) {
    // Affine: fixed points b / (d - a) and infinity; infinity attracts when |a/d| > 1.
    if (std::abs(a) > std::abs(d)) return PlanePoint::at_infinity();
    return {b / (d - a), false};
  }
  const Complex disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
  for (const Complex z : {(a - d + disc) / (2.0 * c), (a - d - disc) / (2.0 * c)}) {
    if (std::abs(c * z + d) > 1.0) return {z, false};
  }
  return {(a - d + disc) / (2.0 * c), false};
}

/// Attracting fixed points of all words of a given length: a sample of the limit set.
inline std::vector<PlanePoint> limit_set_sample(const SchottkyGroup& group, int len) {
  const Orbit orbit = enumerate_orbit(group, len);
  std::vector<PlanePoint> out;
  for (std::size_t i = orbit.level_begin(len); i < orbit.level_begin(len + 1); ++i) {
    out.push_back(attracting_fixed_point(orbit.element(i)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Visual averages of the locally constant function.

inline constexpr double kMaxUnresolvedWeight = 1e-3;

/// Sphere grid with about 10^4 nodes.
inline sphere::QuadratureGrid cocycle_grid(int n) { return n == 2 ? sphere::make_grid(2, 9999) : sphere::make_grid(3, 140); }

/// Isometry of the ball taking 0 to a, restricted to the boundary.
inline Vec3 boundary_transport(const Vec3& a, const Vec3& xi) {
  const double a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
  const double ax = a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2];
  const double den = 1.0 + 2.0 * ax + a2;
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = ((1.0 - a2) * xi[i] + 2.0 * (1.0 + ax) * a[i]) / den;
  return out;
}

struct VisualAverage {
  Complex value;
  std::array<Complex, 3> gradient{};  // Euclidean gradient in the ball coordinates
  double unresolved_weight = 0.0;     // as a fraction of the total
};

/// Phi_0 f(a) = (1/vol) int f(T_a xi) dsigma(xi), T_a the transport above. The
/// gradient uses grad_a P / P at the transported node. Unresolved nodes count as
/// zero; BudgetError when their share reaches 1e-3.
inline VisualAverage visual_average(const SchottkyGroup& group, const sphere::QuadratureGrid& grid,
                                    const poisson::BallPoint& a, int max_steps = kDefaultResolveSteps) {
  if (grid.n != group.n() || a.n() != group.n()) throw DomainError("visual_average: dimension mismatch");
  const int n = group.n();
  const Vec3& x = a.x();
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  VisualAverage out;
  double total = 0.0, missing = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = grid.weights[j];
    total += w;
    const Vec3 zeta = boundary_transport(x, grid.nodes[j].cartesian());
    const auto f = locally_constant_f(group, zeta, max_steps);
    if (!f) {
      missing += w;
      continue;
    }
    if (*f == Complex{}) continue;
    out.value += w * *f;
    const Vec3 d{x[0] - zeta[0], x[1] - zeta[1], x[2] - zeta[2]};
    const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    for (int i = 0; i < 3; ++i) {
      out.gradient[i] += w * *f * ((n - 1) * (-2.0 * x[i] / (1.0 - r2) - 2.0 * d[i] / d2));
    }
  }
  out.unresolved_weight = missing / total;
  if (out.unresolved_weight >= kMaxUnresolvedWeight) {
    throw BudgetError("visual_average: unresolved grid weight " + std::to_string(out.unresolved_weight) +
                      " reaches the 1e-3 limit");
  }
  const double vol = sphere::sphere_volume(n);
  out.value /= vol;
  for (auto& g : out.gradient) g /= vol;
  return out;
}

/// Phi_0 f(x) - Phi_0 f(gamma^-1 x) - c(gamma); vanishes up to quadrature error.
inline Complex harmonic_cocycle_check(const SchottkyGroup& group, const poisson::BallPoint& x, const Word& gamma,
                                      const sphere::QuadratureGrid& grid) {
  const Vec3 moved = group.element(gamma).inverse().apply_ball(x.x());
  const poisson::BallPoint y(group.n(), moved);
  return visual_average(group, grid, x).value - visual_average(group, grid, y).value - group.cocycle_value(gamma);
}

inline Complex harmonic_cocycle_check(const SchottkyGroup& group, const poisson::BallPoint& x, const Word& gamma) {
  return harmonic_cocycle_check(group, x, gamma, cocycle_grid(group.n()));
}

struct GradientRow {
  double distance = 0.0;  // d(0, x)
  double gradient = 0.0;  // hyperbolic |grad Phi_0 f|(x)
};

struct GradientProfile {
  std::vector<GradientRow> rows;
  double fitted_rate = 0.0;  // least-squares slope of log |grad|^2 against d over the fit window
  double fit_lo = 0.5;
  double fit_hi = 2.5;
  int monotonicity_violations = 0;  // increases of |grad| among rows with d > 1
};

/// Gradient magnitudes at hyperbolic distances `distances` along the ray from 0 toward `direction`.
inline GradientProfile gradient_decay_profile(const SchottkyGroup& group, const Vec3& direction,
                                              const std::vector<double>& distances,
                                              const sphere::QuadratureGrid& grid) {
  const auto exit = resolve_component(group, direction);
  if (!exit || !exit->empty()) throw DomainError("gradient_decay_profile: ray must exit through the base component");
  const double len = poisson::norm(direction);
  GradientProfile prof;
  prof.rows.resize(distances.size());
  parallel_for(distances.size(), [&](std::size_t i) {
    const double r = std::tanh(0.5 * distances[i]);
    const poisson::BallPoint x(group.n(), {r * direction[0] / len, r * direction[1] / len, r * direction[2] / len});
    const auto v = visual_average(group, grid, x);
    double g2 = 0.0;
    for (const auto& g : v.gradient) g2 += std::norm(g);
    prof.rows[i] = {distances[i], std::sqrt(g2) / x.conformal_factor()};
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& row : prof.rows) {
    if (row.distance < prof.fit_lo || row.distance > prof.fit_hi || !(row.gradient > 0.0)) continue;
    const double y = 2.0 * std::log(row.gradient);
    sx += row.distance;
    sy += y;
    sxx += row.distance * row.distance;
    sxy += row.distance * y;
    ++m;
  }
  if (m >= 2) prof.fitted_rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  for (std::size_t i = 1; i < prof.rows.size(); ++i) {
    if (prof.rows[i - 1].distance > 1.0 && prof.rows[i].gradient > prof.rows[i - 1].gradient) {
      ++prof.monotonicity_violations;
    }
  }
  return prof;
}

/// Boundary point where the example groups' base region is widest: w = 0 of
/// the plane model (south pole for n = 3, angle pi for n = 2).
inline Vec3 base_direction(int n) { return n == 2 ? Vec3{-1.0, 0.0, 0.0} : Vec3{0.0, 0.0, -1.0}; }

}  // namespace poisson_currents::kleinian
