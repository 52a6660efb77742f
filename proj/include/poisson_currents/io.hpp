#pragma once

// JSON for spectral forms and Schottky groups, CSV with full double precision.
//
//   spectral form: {"n": 3, "p": 1, "kmax": 2, "modes": [{"k": 0, "idx": 1, "re": 1.0, "im": 0.0}]}
//   group: {"n": 3, "rank": 1, "disks": [{"center": [x, y], "radius": r}, ...],
//           "pairing": [[minus_index, plus_index], ...], "cocycle": [{"re": 1.0, "im": 0.0}]}
// For n = 2 a disk centre is [x] (an interval of the real line).

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "poisson_currents/error.hpp"
#include "poisson_currents/kleinian.hpp"
#include "poisson_currents/sphere.hpp"

namespace poisson_currents::io {

using nlohmann::json;
using Complex = std::complex<double>;

/// Input that does not describe a valid object.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

namespace detail {

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

inline Complex complex_from(const json& j) {
  return {field<double>(j, "re"), j.contains("im") ? field<double>(j, "im") : 0.0};
}

inline json complex_to(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace detail

inline json to_json(const sphere::SpectralForm& f) {
  json modes = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == Complex{}) continue;
    const auto m = f.mode(i);
    modes.push_back({{"k", m.k}, {"idx", m.idx}, {"re", f[i].real()}, {"im", f[i].imag()}});
  }
  return {{"n", f.n()}, {"p", f.p()}, {"kmax", f.kmax()}, {"modes", modes}};
}

/// kmax defaults to the largest level listed.
inline sphere::SpectralForm spectral_form_from_json(const json& j) {
  using detail::field;
  const int n = field<int>(j, "n"), p = field<int>(j, "p");
  const json modes = j.contains("modes") ? j.at("modes") : json::array();
  if (!modes.is_array()) throw InputError("'modes' must be an array");
  int kmax = sphere::min_level(p) - 1;
  for (const auto& m : modes) kmax = std::max(kmax, field<int>(m, "k"));
  if (j.contains("kmax")) kmax = std::max(kmax, field<int>(j, "kmax"));
  try {
    sphere::SpectralForm f(n, p, kmax);
    for (const auto& m : modes) {
      f.at({n, p, field<int>(m, "k"), field<int>(m, "idx")}) += detail::complex_from(m);
    }
    return f;
  } catch (const DomainError& e) {
    throw InputError(std::string("spectral form: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw InputError(std::string("spectral form: mode out of range: ") + e.what());
  }
}

inline json to_json(const kleinian::SchottkyGroup& g) {
  json disks = json::array(), pairing = json::array(), cocycle = json::array();
  const auto center = [&](Complex c) { return g.n() == 2 ? json::array({c.real()}) : json::array({c.real(), c.imag()}); };
  for (int i = 0; i < g.rank(); ++i) {
    const auto& d = g.disks()[i];
    disks.push_back({{"center", center(d.minus.center)}, {"radius", d.minus.radius}});
    disks.push_back({{"center", center(d.plus.center)}, {"radius", d.plus.radius}});
    pairing.push_back({2 * i, 2 * i + 1});
    cocycle.push_back(detail::complex_to(g.cocycle()[i]));
  }
  return {{"n", g.n()}, {"rank", g.rank()}, {"disks", disks}, {"pairing", pairing}, {"cocycle", cocycle}};
}

inline kleinian::SchottkyGroup group_from_json(const json& j) {
  using detail::field;
  const int n = field<int>(j, "n");
  if (n != 2 && n != 3) throw InputError("group: n must be 2 or 3");
  const json disks = j.contains("disks") ? j.at("disks") : json();
  if (!disks.is_array()) throw InputError("group: 'disks' must be an array");
  std::vector<kleinian::Disk> all;
  for (const auto& d : disks) {
    const auto c = field<std::vector<double>>(d, "center");
    if (c.size() != static_cast<std::size_t>(n - 1)) {
      throw InputError("group: disk centre needs " + std::to_string(n - 1) + " coordinate(s)");
    }
    all.push_back({Complex(c[0], n == 3 ? c[1] : 0.0), field<double>(d, "radius")});
  }
  const int rank = j.contains("rank") ? field<int>(j, "rank") : static_cast<int>(all.size() / 2);
  if (rank < 1 || all.size() != static_cast<std::size_t>(2 * rank)) {
    throw InputError("group: needs 2 * rank disks with rank >= 1");
  }
  std::vector<kleinian::DiskPair> pairs;
  if (j.contains("pairing")) {
    const auto pairing = field<std::vector<std::vector<int>>>(j, "pairing");
    if (pairing.size() != static_cast<std::size_t>(rank)) throw InputError("group: one pairing per generator");
    std::vector<bool> used(all.size(), false);
    for (const auto& pr : pairing) {
      if (pr.size() != 2) throw InputError("group: a pairing lists [minus, plus]");
      for (int idx : pr) {
        if (idx < 0 || idx >= static_cast<int>(all.size()) || used[idx]) throw InputError("group: bad disk index in pairing");
        used[idx] = true;
      }
      pairs.push_back({all[pr[0]], all[pr[1]]});
    }
  } else {
    for (int i = 0; i < rank; ++i) pairs.push_back({all[2 * i], all[2 * i + 1]});
  }
  std::vector<Complex> cocycle;
  if (j.contains("cocycle")) {
    const json& c = j.at("cocycle");
    if (!c.is_array()) throw InputError("group: 'cocycle' must be an array");
    for (const auto& v : c) cocycle.push_back(detail::complex_from(v));
  }
  try {
    return kleinian::SchottkyGroup(n, std::move(pairs), std::move(cocycle));
  } catch (const DomainError& e) {
    throw InputError(std::string("group: ") + e.what());
  }
}

/// %.17g: round-trips every double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Comma-separated rows with a header line.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    write_row(header);
  }

  CsvWriter& operator<<(double x) { return push(format_double(x)); }
  CsvWriter& operator<<(int x) { return push(std::to_string(x)); }
  CsvWriter& operator<<(std::size_t x) { return push(std::to_string(x)); }
  CsvWriter& operator<<(const std::string& s) { return push(s); }
  CsvWriter& operator<<(const char* s) { return push(s); }

 private:
  CsvWriter& push(std::string cell) {
    row_.push_back(std::move(cell));
    if (row_.size() == columns_) {
      write_row(row_);
      row_.clear();
    }
    return *this;
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t columns_;
  std::vector<std::string> row_;
};

}  // namespace poisson_currents::io
