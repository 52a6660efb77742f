#pragma once

// Batch commands behind the poisson-currents executable. Each command reads a
// JSON config merged with flag overrides, writes CSV or JSON, reports one
// diagnostic line and returns an exit code: 0 pass, 1 tolerance failure,
// 2 input error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "poisson_currents/currents.hpp"
#include "poisson_currents/error.hpp"
#include "poisson_currents/io.hpp"
#include "poisson_currents/kleinian.hpp"
#include "poisson_currents/poisson.hpp"
#include "poisson_currents/specfun.hpp"
#include "poisson_currents/sphere.hpp"

namespace poisson_currents::cli {

using nlohmann::json;
using io::InputError;
using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using sphere::kPi;

enum ExitCode : int { kPass = 0, kToleranceFailure = 1, kInputError = 2 };

inline constexpr int kMaxKmax = 64;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"boundary-limit",   "isometry-check",  "specfun-identities",
                                                 "orbit-series",     "schottky-current", "cocycle-pairing",
                                                 "gradient-origin"};
  return names;
}

/// Parsed command line. Unset flags fall back to the config file, then to
/// per-command defaults.
struct RunConfig {
  std::string command;
  std::string config_path;
  std::string out;
  std::optional<int> kmax;
  std::optional<std::string> rgrid;
  std::optional<int> max_word_len;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

/// "geometric:J" (r_j = 1 - 2^-j, j = 1..J) or "list:r1,r2,...".
inline std::vector<double> parse_rgrid(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon), rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "geometric") {
      std::size_t used = 0;
      const int count = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
      return poisson::geometric_rgrid(count);
    }
    if (kind == "list") {
      std::vector<double> r;
      std::stringstream ss(rest);
      for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size() || !(v > 0.0 && v < 1.0)) throw std::invalid_argument(item);
        r.push_back(v);
      }
      if (r.empty()) throw std::invalid_argument(rest);
      return r;
    }
  } catch (const std::logic_error&) {
    // stoi/stod failures and DomainError from the grid builder
  }
  throw InputError("bad r-grid '" + spec + "' (expected geometric:J with 1 <= J <= 52 or list:r1,r2,... in (0, 1))");
}

/// Config file contents with the flags written over keys of the same name.
class Settings {
 public:
  explicit Settings(const RunConfig& run) : out_(run.out) {
    if (!run.config_path.empty()) {
      doc_ = io::read_json_file(run.config_path);
      if (!doc_.is_object()) throw InputError(run.config_path + ": config must be a JSON object");
      base_ = std::filesystem::path(run.config_path).parent_path();
    } else {
      doc_ = json::object();
    }
    if (run.kmax) doc_["kmax"] = *run.kmax;
    if (run.rgrid) doc_["rgrid"] = *run.rgrid;
    if (run.max_word_len) doc_["max_word_len"] = *run.max_word_len;
    if (run.tol) doc_["tol"] = *run.tol;
    if (run.seed) doc_["seed"] = *run.seed;
  }

  bool has(const char* key) const { return doc_.contains(key); }
  const json& doc() const { return doc_; }
  const std::string& out() const { return out_; }

  std::optional<int> kmax() const {
    if (!has("kmax")) return std::nullopt;
    const int k = io::detail::field<int>(doc_, "kmax");
    if (k < 0 || k > kMaxKmax) throw InputError("kmax must lie in [0, 64]");
    return k;
  }

  int kmax_or(int fallback) const { return kmax().value_or(fallback); }

  std::vector<double> rgrid(const std::string& fallback = "geometric:20") const {
    return parse_rgrid(has("rgrid") ? io::detail::field<std::string>(doc_, "rgrid") : fallback);
  }

  int max_word_len(int fallback) const {
    const int L = has("max_word_len") ? io::detail::field<int>(doc_, "max_word_len") : fallback;
    if (L < 1 || L > kleinian::kMaxWordLength) throw InputError("max_word_len must lie in [1, 20]");
    return L;
  }

  double tol(double fallback) const { return positive("tol", fallback); }

  double positive(const char* key, double fallback) const {
    const double t = has(key) ? io::detail::field<double>(doc_, key) : fallback;
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError(std::string(key) + " must be positive and finite");
    return t;
  }

  std::uint64_t seed(std::uint64_t fallback) const {
    return has("seed") ? io::detail::field<std::uint64_t>(doc_, "seed") : fallback;
  }

  /// An object given inline or as a path relative to the config file.
  json object(const char* key) const {
    if (!has(key)) throw InputError(std::string("config needs '") + key + "'");
    const json& v = doc_.at(key);
    if (v.is_string()) {
      std::filesystem::path p = v.get<std::string>();
      if (p.is_relative()) p = base_ / p;
      return io::read_json_file(p.string());
    }
    if (!v.is_object()) throw InputError(std::string("'") + key + "' must be an object or a file path");
    return v;
  }

  sphere::SpectralForm form(const char* key) const {
    auto f = io::spectral_form_from_json(object(key));
    if (const auto k = kmax()) f = f.resized(*k);
    return f;
  }

  kleinian::SchottkyGroup group() const { return io::group_from_json(object("group")); }

 private:
  json doc_;
  std::filesystem::path base_;
  std::string out_;
};

/// Single-output commands write to --out when given, else to the stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

inline int verdict(std::ostream& err, const std::string& command, bool pass, const std::string& detail) {
  err << command << ": " << (pass ? "PASS" : "FAIL") << ": " << detail << '\n';
  return pass ? kPass : kToleranceFailure;
}

inline std::ofstream open_in(const std::filesystem::path& dir, const char* name) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw InputError("cannot write " + (dir / name).string());
  return f;
}

inline std::filesystem::path make_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec || !std::filesystem::is_directory(out)) throw InputError("cannot create output directory " + out);
  return out;
}

inline Vec3 vec3_from(const json& j, int n, const char* what) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw InputError(std::string(what) + " must be an array of numbers");
  }
  if (v.size() != static_cast<std::size_t>(n)) throw InputError(std::string(what) + " needs " + std::to_string(n) + " coordinates");
  Vec3 x{};
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
  return x;
}

inline currents::PlanePolynomial polynomial_from(const json& terms) {
  if (!terms.is_array()) throw InputError("a polynomial is an array of {px, py, re, im} terms");
  std::vector<currents::PlanePolynomial::Term> t;
  for (const auto& term : terms) {
    t.push_back({io::detail::field<int>(term, "px"), io::detail::field<int>(term, "py"), io::detail::complex_from(term)});
  }
  try {
    return currents::PlanePolynomial(std::move(t));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Shell pairings of Phi_p(form) against eta (default: the form itself) over
/// the r-grid. Passes iff the gap at the largest r is below tol (default 1e-4).
inline int cmd_boundary_limit(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto omega = s.form("form");
  auto eta = s.has("eta") ? s.form("eta") : omega;
  if (eta.n() != omega.n() || eta.p() != omega.p()) throw InputError("eta must have the form's n and p");
  if (omega.p() < 1 || 2 * omega.p() > omega.n()) throw InputError("boundary-limit needs 1 <= p <= n/2");
  eta = eta.resized(omega.kmax());
  const double tol = s.tol(1e-4);
  const auto rows = poisson::pairing_table(omega, eta, s.rgrid());
  Sink sink(s.out(), out);
  io::CsvWriter csv(*sink, {"r", "re_pairing", "im_pairing", "re_limit", "im_limit", "abs_gap"});
  for (const auto& row : rows) {
    csv << row.r << row.pairing.real() << row.pairing.imag() << row.limit_reference.real()
        << row.limit_reference.imag() << row.abs_gap;
  }
  const double gap = rows.back().abs_gap;
  return detail::verdict(err, "boundary-limit", gap < tol,
                         "gap " + detail::sci(gap) + " at r = " + io::format_double(rows.back().r) + ", tol " + detail::sci(tol));
}

/// Ball L^2 norm of Phi_1(form) at n = 2, closed form against quadrature.
inline int cmd_isometry_check(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto omega = s.form("form");
  if (omega.n() != 2 || omega.p() != 1) throw InputError("isometry-check needs an n = 2, p = 1 form");
  const double tol = s.tol(1e-5);
  const auto rep = poisson::l2_ball_norm(omega);
  const bool pass = rep.relative_gap <= tol;
  const json report = {{"closed_form", rep.closed_form},
                       {"quadrature", rep.quadrature},
                       {"relative_gap", rep.relative_gap},
                       {"quadrature_error_estimate", rep.quadrature_error_estimate},
                       {"tol", tol},
                       {"pass", pass}};
  Sink sink(s.out(), out);
  *sink << report.dump(2) << '\n';
  return detail::verdict(err, "isometry-check", pass, "relative gap " + detail::sci(rep.relative_gap) + ", tol " + detail::sci(tol));
}

struct IdentityFamily {
  std::string name;
  int cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
};

/// Hypergeometric identity families with pinned tolerances. k runs to kmax
/// (default 10) in the transformation, oracle and prefactor families.
inline std::vector<IdentityFamily> specfun_identity_families(int kmax = 10) {
  std::vector<IdentityFamily> out;
  const auto add = [&](IdentityFamily& f, double err) {
    ++f.cases;
    f.max_error = std::max(f.max_error, std::isfinite(err) ? err : std::numeric_limits<double>::infinity());
  };

  IdentityFamily collapse{"geometric_collapse", 0, 0.0, 1e-13};
  IdentityFamily zero{"zero_parameter", 0, 0.0, 1e-13};
  for (int i = -18; i <= 19; ++i) {
    const double z = 0.05 * i;
    for (double b : {0.5, 1.5, 2.5, 7.0, 12.0}) {
      add(collapse, std::abs(specfun::gauss_2f1(1.0, b, b, z) * (1.0 - z) - 1.0));
      for (double c : {0.5, 2.5, 9.0}) add(zero, std::abs(specfun::gauss_2f1(0.0, b, c, z) - 1.0));
    }
  }
  out.push_back(collapse);
  out.push_back(zero);

  IdentityFamily transform{"euler_transformation", 0, 0.0, 1e-10};
  for (int n = 2; n <= 4; ++n) {
    for (int p = 1; p <= 2; ++p) {
      for (int k = 0; k <= kmax; ++k) {
        for (int i = 0; i <= 19; ++i) {
          const double z = 0.05 * i;
          const double d = specfun::f_pk_direct(n, p, k, z), t = specfun::f_pk_transformed(n, p, k, z);
          add(transform, std::abs(d - t) / std::max(1.0, std::abs(d)));
        }
      }
    }
  }
  out.push_back(transform);

  IdentityFamily oracle{"bessel_integral_oracle", 0, 0.0, 1e-6};
  for (int n = 2; n <= 4; ++n) {
    for (int p = 1; 2 * p <= n; ++p) {
      for (int k = 0; k <= std::min(kmax, 30); ++k) {
        for (double w : {1.5, 2.0, 5.0}) {
          const double ref = specfun::f_pk(n, p, k, (w - 1.0) / (w + 1.0));
          add(oracle, std::abs(specfun::f_pk_integral_oracle(n, p, k, w).value - ref) / std::abs(ref));
        }
      }
    }
  }
  out.push_back(oracle);

  IdentityFamily chain{"prefactor_chain", 0, 0.0, 1e-10};
  for (const auto& [n, p] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 1}, {4, 2}}) {
    for (int k = 0; k <= std::max(kmax, 20); ++k) {
      const poisson::TransformProfile prof(n, p, k);
      add(chain, std::abs(prof.prefactor() * prof.limit() - poisson::cp_constant(n, p)));
    }
  }
  out.push_back(chain);
  return out;
}

inline int cmd_specfun_identities(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto families = specfun_identity_families(s.kmax_or(10));
  Sink sink(s.out(), out);
  io::CsvWriter csv(*sink, {"family", "cases", "max_error", "tolerance", "pass"});
  bool pass = true;
  std::string failed;
  for (const auto& f : families) {
    const bool ok = f.max_error <= f.tolerance;
    pass = pass && ok;
    if (!ok) failed += " " + f.name;
    csv << f.name << f.cases << f.max_error << f.tolerance << (ok ? "1" : "0");
  }
  return detail::verdict(err, "specfun-identities", pass,
                         pass ? std::to_string(families.size()) + " families within tolerance" : "failed:" + failed);
}

/// Orbit counts and Poincare partial sums per word length (the identity is
/// included in every partial sum). With --out DIR: lengths.csv, words.csv and
/// summary.json; otherwise the lengths table goes to the stream.
inline int cmd_orbit_series(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto group = s.group();
  const int L = s.max_word_len(8);
  std::vector<double> exponents = {group.n() - 1.0};
  if (s.has("exponents")) exponents = io::detail::field<std::vector<double>>(s.doc(), "exponents");
  for (double e : exponents) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InputError("exponents must be positive");
  }
  const auto orbit = kleinian::enumerate_orbit(group, L);

  bool counts_ok = true;
  std::vector<std::vector<kleinian::PoincareRow>> sums;
  for (double e : exponents) sums.push_back(kleinian::poincare_partial_sums(orbit, e));

  const auto write_lengths = [&](std::ostream& os) {
    io::CsvWriter csv(os, {"length", "count", "s", "increment", "partial_sum"});
    for (std::size_t e = 0; e < exponents.size(); ++e) {
      for (int len = 1; len <= L; ++len) {
        const auto count = orbit.level_begin(len + 1) - orbit.level_begin(len);
        csv << len << count << exponents[e] << sums[e][len].increment << sums[e][len].partial_sum;
      }
    }
  };
  for (int len = 0; len <= L; ++len) {
    const double count = static_cast<double>(orbit.level_begin(len + 1) - orbit.level_begin(len));
    counts_ok = counts_ok && count == kleinian::reduced_word_count(group.rank(), len);
  }

  if (s.out().empty()) {
    write_lengths(out);
  } else {
    const auto dir = detail::make_out_dir(s.out());
    auto lengths = detail::open_in(dir, "lengths.csv");
    write_lengths(lengths);
    auto words = detail::open_in(dir, "words.csv");
    io::CsvWriter csv(words, {"index", "word", "length", "displacement"});
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      csv << i << kleinian::word_text(orbit.word(i)) << orbit.length(i) << orbit.displacement(i);
    }
    json summary = {{"n", group.n()}, {"rank", group.rank()}, {"max_word_len", L}, {"words", orbit.size()},
                    {"counts_match", counts_ok}};
    json partial = json::array();
    for (std::size_t e = 0; e < exponents.size(); ++e) partial.push_back({{"s", exponents[e]}, {"partial_sum", sums[e].back().partial_sum}});
    summary["partial_sums"] = partial;
    if (L >= 6) {
      const auto est = kleinian::critical_exponent_estimate(orbit);
      summary["critical_exponent"] = {{"value", est.value}, {"half_width", est.half_width}, {"r_lo", est.r_lo},
                                      {"r_hi", est.r_hi},   {"degenerate", est.degenerate}};
    }
    detail::open_in(dir, "summary.json") << summary.dump(2) << '\n';
  }
  return detail::verdict(err, "orbit-series", counts_ok,
                         std::to_string(orbit.size()) + " words up to length " + std::to_string(L) +
                             (counts_ok ? ", counts match 2r(2r-1)^(L-1)" : ", counts do not match the free group"));
}

// ---------------------------------------------------------------------------

namespace detail {

/// Boundary point of the ray used for gradient decay and the support bump:
/// w = 0 of the plane model if it lies in the base tile, else infinity.
inline Vec3 default_ray(const kleinian::SchottkyGroup& g) {
  const Vec3 zero = kleinian::base_direction(g.n());
  const auto w = kleinian::resolve_component(g, zero);
  if (w && w->empty()) return zero;
  return g.n() == 2 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 0.0, 1.0};
}

/// Largest width <= 0.8 (shrinking by 0.8) whose cap about `center`
/// resolves to the base tile at every sample.
inline double base_cap_width(const kleinian::SchottkyGroup& g, const Vec3& center) {
  const double len = poisson::norm(center);
  const Vec3 c{center[0] / len, center[1] / len, center[2] / len};
  // Orthonormal frame (c, u, v).
  Vec3 u = std::abs(c[2]) < 0.9 ? Vec3{-c[1], c[0], 0.0} : Vec3{1.0, 0.0, 0.0};
  if (g.n() == 2) u = {-c[1], c[0], 0.0};
  const double dot = u[0] * c[0] + u[1] * c[1] + u[2] * c[2];
  for (int i = 0; i < 3; ++i) u[static_cast<std::size_t>(i)] -= dot * c[static_cast<std::size_t>(i)];
  const double ul = poisson::norm(u);
  for (auto& x : u) x /= ul;
  const Vec3 v{c[1] * u[2] - c[2] * u[1], c[2] * u[0] - c[0] * u[2], c[0] * u[1] - c[1] * u[0]};
  for (double width = 0.8; width > 1e-3; width *= 0.8) {
    bool inside = true;
    for (int ring = 1; ring <= 8 && inside; ++ring) {
      const double a = width * ring / 8.0;
      const int spokes = g.n() == 2 ? 2 : 32;
      for (int j = 0; j < spokes && inside; ++j) {
        const double phi = 2.0 * kPi * j / spokes;
        const double cu = g.n() == 2 ? (j == 0 ? 1.0 : -1.0) : std::cos(phi), cv = g.n() == 2 ? 0.0 : std::sin(phi);
        Vec3 x{};
        for (int i = 0; i < 3; ++i) {
          const auto k = static_cast<std::size_t>(i);
          x[k] = std::cos(a) * c[k] + std::sin(a) * (cu * u[k] + cv * v[k]);
        }
        const auto w = kleinian::resolve_component(g, x);
        inside = w && w->empty();
      }
    }
    if (inside) return width;
  }
  throw InputError("no cap about the ray direction fits in the base tile");
}

}  // namespace detail

struct SchottkyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Cocycle identity at seeded ball points for every generator and inverse,
/// gradient decay along the ray, and support_check of a bump in the base tile.
/// With --out DIR the three tables and summary.csv are written there;
/// otherwise the summary goes to the stream.
inline int cmd_schottky_current(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto group = s.group();
  const int n = group.n();
  const double tol = s.tol(5e-3);
  const double support_tol = s.positive("support_tol", 1e-3);
  const auto grid = kleinian::cocycle_grid(n);
  const Vec3 ray = s.has("ray") ? detail::vec3_from(s.doc().at("ray"), n, "ray") : detail::default_ray(group);

  // Cocycle identity at seeded points of the ball of radius 1/2.
  Rng rng(s.seed(1));
  std::vector<poisson::BallPoint> points = {poisson::BallPoint(n, {0.0, 0.0, 0.0})};
  while (points.size() < 3) {
    Vec3 x{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), n == 3 ? rng.uniform(-0.5, 0.5) : 0.0};
    if (poisson::norm(x) <= 0.5) points.emplace_back(n, x);
  }
  struct CocycleRow {
    std::size_t point;
    kleinian::Word word;
    Complex residual;
  };
  std::vector<CocycleRow> cocycle_rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int l = 0; l < 2 * group.rank(); ++l) cocycle_rows.push_back({i, {l}, {}});
  }
  double worst = 0.0;
  for (auto& row : cocycle_rows) {
    row.residual = kleinian::harmonic_cocycle_check(group, points[row.point], row.word, grid);
    worst = std::max(worst, std::abs(row.residual));
  }

  std::vector<double> distances;
  for (int i = 0; i <= 25; ++i) distances.push_back(0.1 * i);
  const auto profile = kleinian::gradient_decay_profile(group, ray, distances, grid);

  const int kmax = s.kmax_or(24);
  const double width = s.has("bump_width") ? s.positive("bump_width", 0.8) : detail::base_cap_width(group, ray);
  const auto eta = currents::bump_form(n, ray, width, kmax);
  const auto support = currents::support_check(group, eta, s.rgrid(), grid);
  const double terminal = std::abs(support.rows.back().pairing);

  const std::vector<SchottkyCheck> checks = {
      {"cocycle_identity", worst, tol, worst <= tol},
      {"gradient_rate", profile.fitted_rate, -(n - 1.0), profile.fitted_rate <= -(n - 1.0)},
      {"support_terminal_pairing", terminal, support_tol, terminal <= support_tol},
  };
  const auto write_summary = [&](std::ostream& os) {
    io::CsvWriter csv(os, {"check", "value", "threshold", "pass"});
    for (const auto& c : checks) csv << c.name << c.value << c.threshold << (c.pass ? "1" : "0");
  };

  if (s.out().empty()) {
    write_summary(out);
  } else {
    const auto dir = detail::make_out_dir(s.out());
    {
      auto f = detail::open_in(dir, "cocycle_check.csv");
      io::CsvWriter csv(f, {"x0", "x1", "x2", "word", "residual_re", "residual_im", "abs_residual"});
      for (const auto& row : cocycle_rows) {
        const Vec3& x = points[row.point].x();
        csv << x[0] << x[1] << x[2] << kleinian::word_text(row.word) << row.residual.real() << row.residual.imag()
            << std::abs(row.residual);
      }
    }
    {
      auto f = detail::open_in(dir, "gradient_decay.csv");
      io::CsvWriter csv(f, {"distance", "gradient"});
      for (const auto& row : profile.rows) csv << row.distance << row.gradient;
    }
    {
      auto f = detail::open_in(dir, "support_check.csv");
      io::CsvWriter csv(f, {"r", "re_pairing", "im_pairing", "unresolved_weight"});
      for (const auto& row : support.rows) csv << row.r << row.pairing.real() << row.pairing.imag() << row.unresolved_weight;
    }
    auto f = detail::open_in(dir, "summary.csv");
    write_summary(f);
  }
  bool pass = true;
  std::string text;
  for (const auto& c : checks) {
    pass = pass && c.pass;
    text += (text.empty() ? "" : ", ") + c.name + " " + io::format_double(c.value) + (c.pass ? " ok" : " FAILED");
  }
  return detail::verdict(err, "schottky-current", pass, text);
}

/// Area pairing against tau_bar of the boundary restrictions on the unit
/// disk: the (x, y) case, a constant pair, a seeded sweep and any user cases.
inline int cmd_cocycle_pairing(const Settings& s, std::ostream& out, std::ostream& err) {
  const double tol = s.tol(1e-4);
  const int count = s.has("count") ? io::detail::field<int>(s.doc(), "count") : 20;
  const int max_degree = s.has("max_degree") ? io::detail::field<int>(s.doc(), "max_degree") : 4;
  if (count < 0 || count > 10000) throw InputError("count must lie in [0, 10000]");
  if (max_degree < 1 || max_degree > 16) throw InputError("max_degree must lie in [1, 16]");

  std::vector<std::pair<std::string, currents::FuchsianCase>> cases;
  cases.emplace_back("xy", currents::fuchsian_comparison(currents::PlanePolynomial::x(), currents::PlanePolynomial::y()));
  cases.emplace_back("constant", currents::fuchsian_comparison(currents::PlanePolynomial::constant(1.0),
                                                               currents::PlanePolynomial::constant(Complex(0.0, 2.0))));
  const auto sweep = currents::fuchsian_sweep(s.seed(2024), count, max_degree);
  for (std::size_t i = 0; i < sweep.size(); ++i) cases.emplace_back("sweep_" + std::to_string(i), sweep[i]);
  if (s.has("cases")) {
    const json& user = s.doc().at("cases");
    if (!user.is_array()) throw InputError("'cases' must be an array of {F0, F1}");
    for (std::size_t i = 0; i < user.size(); ++i) {
      const auto F0 = detail::polynomial_from(io::detail::field<json>(user[i], "F0"));
      const auto F1 = detail::polynomial_from(io::detail::field<json>(user[i], "F1"));
      if (std::max(F0.degree(), F1.degree()) > 16) throw InputError("user polynomials are limited to degree 16");
      cases.emplace_back("user_" + std::to_string(i), currents::fuchsian_comparison(F0, F1));
    }
  }

  Sink sink(s.out(), out);
  io::CsvWriter csv(*sink, {"case_id", "tau_re", "tau_im", "taubar_re", "taubar_im", "gap"});
  double worst = 0.0;
  for (const auto& [id, c] : cases) {
    csv << id << c.tau.real() << c.tau.imag() << c.tau_bar.real() << c.tau_bar.imag() << c.gap;
    worst = std::max(worst, c.gap);
  }
  return detail::verdict(err, "cocycle-pairing", worst <= tol,
                         std::to_string(cases.size()) + " cases, max gap " + detail::sci(worst) + ", tol " + detail::sci(tol));
}

/// |grad Phi_0 f|^2 at the origin by the moment formula and by finite
/// differences. Without a form, f is the first coordinate on S^2.
inline int cmd_gradient_origin(const Settings& s, std::ostream& out, std::ostream& err) {
  sphere::SpectralForm f(3, 0, 1);
  if (s.has("form")) {
    f = s.form("form");
    if (f.p() != 0) throw InputError("gradient-origin needs a p = 0 form");
  } else {
    const auto grid = sphere::grid_for_kmax(3, 1);
    sphere::SampledForm x1{3, 0, {}};
    for (const auto& node : grid.nodes) x1.values.push_back({{node.cartesian()[0], 0.0}});
    f = sphere::analyze(grid, x1, s.kmax_or(1));
  }
  const double tol = s.tol(1e-6);
  const auto rep = poisson::gradient_at_origin(f);
  const double gap = std::abs(rep.finite_difference - rep.formula);
  const bool pass = gap <= tol * std::max(1.0, rep.formula);
  const json report = {{"n", f.n()},   {"formula", rep.formula}, {"finite_difference", rep.finite_difference},
                       {"gap", gap},   {"tol", tol},             {"pass", pass}};
  Sink sink(s.out(), out);
  *sink << report.dump(2) << '\n';
  return detail::verdict(err, "gradient-origin", pass, "gap " + detail::sci(gap) + ", tol " + detail::sci(tol));
}

// ---------------------------------------------------------------------------

/// Runs one command; every error becomes a diagnostic and an exit code.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  using Command = std::function<int(const Settings&, std::ostream&, std::ostream&)>;
  static const std::map<std::string, Command> commands = {
      {"boundary-limit", cmd_boundary_limit},     {"isometry-check", cmd_isometry_check},
      {"specfun-identities", cmd_specfun_identities}, {"orbit-series", cmd_orbit_series},
      {"schottky-current", cmd_schottky_current}, {"cocycle-pairing", cmd_cocycle_pairing},
      {"gradient-origin", cmd_gradient_origin}};
  const auto it = commands.find(config.command);
  if (it == commands.end()) {
    err << "error: unknown command '" << config.command << "'\n";
    return kInputError;
  }
  try {
    const Settings settings(config);
    return it->second(settings, out, err);
  } catch (const InputError& e) {
    err << config.command << ": input error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << config.command << ": input error: " << e.what() << '\n';
  } catch (const BudgetError& e) {
    err << config.command << ": budget exceeded: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << config.command << ": input error: " << e.what() << '\n';
  } catch (const ConvergenceError& e) {
    err << config.command << ": FAIL: " << e.what() << '\n';
    return kToleranceFailure;
  }
  return kInputError;
}

}  // namespace poisson_currents::cli
