#pragma once

// CSV and JSON files for paths, jump events, triplets and likelihoods.
//
//   paths.csv    path,t,x1,...,xm
//   events.csv   path,component,t,size
//   meta.json    {"m", "n_paths", "steps", "dt", "horizon", "seed"}
//
// Paths are numbered from 0; components from 1. Every real is written in
// the shortest form that reads back to the same double.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "locindep/characteristics.hpp"
#include "locindep/error.hpp"
#include "locindep/format.hpp"
#include "locindep/likelihood.hpp"
#include "locindep/simulate.hpp"

namespace locindep::io {

inline void write_paths_csv(std::ostream& out, const PathSet& paths) {
  out << "path,t";
  for (std::size_t k = 0; k < paths.dimension(); ++k) out << ",x" << k + 1;
  out << '\n';
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    for (std::size_t i = 0; i <= paths.steps(); ++i) {
      out << p << ',' << format_double(paths.grid()[i]);
      for (double v : paths.state(p, i)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

inline void write_events_csv(std::ostream& out, const PathSet& paths) {
  out << "path,component,t,size\n";
  for (const auto& e : paths.events())
    out << e.path << ',' << e.component + 1 << ',' << format_double(paths.grid()[e.step]) << ','
        << format_double(e.size) << '\n';
}

inline nlohmann::json meta_json(const PathSet& paths) {
  nlohmann::json j;
  j["m"] = paths.dimension();
  j["n_paths"] = paths.n_paths();
  j["steps"] = paths.steps();
  j["dt"] = paths.dt();
  j["horizon"] = paths.horizon();
  j["seed"] = paths.seed();
  return j;
}

/// `path,t,B,C,nu` rows for one component.
inline void write_triplet_csv(std::ostream& out, const PathSet& paths, const Triplet& tr) {
  out << "path,t,B,C,nu\n";
  for (std::size_t p = 0; p < tr.B.n_paths(); ++p)
    for (std::size_t i = 0; i < tr.B.points(); ++i)
      out << p << ',' << format_double(paths.grid()[i]) << ',' << format_double(tr.B(p, i)) << ','
          << format_double(tr.C(p, i)) << ',' << format_double(tr.nu(p, i)) << '\n';
}

/// `path,t,logZ` rows for one component.
inline void write_loglik_csv(std::ostream& out, const PathSet& paths, const LogLikProcess& ll) {
  out << "path,t,logZ\n";
  for (std::size_t p = 0; p < ll.logZ.n_paths(); ++p)
    for (std::size_t i = 0; i < ll.logZ.points(); ++i)
      out << p << ',' << format_double(paths.grid()[i]) << ',' << format_double(ll.logZ(p, i))
          << '\n';
}

/// Writes `content` to `path` via a temporary file and rename, so readers
/// never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SpecError("cannot write " + tmp);
    out << content;
    if (!out) throw SpecError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw SpecError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

/// Writes paths.csv, events.csv and meta.json into `dir`.
inline void write_path_dir(const std::filesystem::path& dir, const PathSet& paths) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw SpecError("cannot create directory " + dir.string() + ": " + ec.message());
  std::ostringstream p, e;
  write_paths_csv(p, paths);
  write_events_csv(e, paths);
  write_file_atomic(dir / "paths.csv", p.str());
  write_file_atomic(dir / "events.csv", e.str());
  write_file_atomic(dir / "meta.json", meta_json(paths).dump(2) + "\n");
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

inline double to_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw SpecError("line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  return v;
}

inline std::size_t to_index(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw SpecError("line " + std::to_string(line_no) + ": bad index '" + std::string(s) + "'");
  return v;
}

inline void chomp(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace detail

/// Reads a directory produced by `write_path_dir`. events.csv and meta.json
/// are optional; without events no jumps are known.
inline PathSet read_path_dir(const std::filesystem::path& dir) {
  std::ifstream in(dir / "paths.csv");
  if (!in) throw SpecError("cannot open " + (dir / "paths.csv").string());
  std::string line;
  if (!std::getline(in, line)) throw SpecError("paths.csv is empty");
  detail::chomp(line);
  const auto header = detail::split_csv(line);
  if (header.size() < 3 || header[0] != "path" || header[1] != "t")
    throw SpecError("paths.csv header must be path,t,x1,...");
  const std::size_t m = header.size() - 2;
  for (std::size_t k = 0; k < m; ++k)
    if (header[k + 2] != "x" + std::to_string(k + 1)) throw SpecError("paths.csv header must be path,t,x1,...");

  std::vector<double> times;
  std::vector<double> values;
  std::size_t n_paths = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != m + 2) throw SpecError("line " + std::to_string(line_no) + ": wrong column count");
    const std::size_t p = detail::to_index(cells[0], line_no);
    const double t = detail::to_double(cells[1], line_no);
    if (p == n_paths) {
      ++n_paths;
    } else if (p + 1 != n_paths) {
      throw SpecError("line " + std::to_string(line_no) + ": paths must be contiguous and ordered");
    }
    if (p == 0) times.push_back(t);
    for (std::size_t k = 0; k < m; ++k) values.push_back(detail::to_double(cells[k + 2], line_no));
  }
  if (times.size() < 2) throw SpecError("paths.csv needs at least two grid points per path");
  const std::size_t steps = times.size() - 1;
  if (values.size() != n_paths * (steps + 1) * m)
    throw SpecError("paths.csv rows do not form complete paths on a common grid");

  std::uint64_t seed = 0;
  if (std::ifstream meta(dir / "meta.json"); meta) {
    try {
      seed = nlohmann::json::parse(meta).value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw SpecError(std::string("malformed meta.json: ") + e.what());
    }
  }

  PathSet out(n_paths, m, steps, times.back(), seed);
  for (std::size_t i = 0; i <= steps; ++i)
    if (std::fabs(out.grid()[i] - times[i]) > 1e-9 * std::max(1.0, times.back()))
      throw SpecError("paths.csv grid is not uniform");
  std::size_t idx = 0;
  for (std::size_t p = 0; p < n_paths; ++p)
    for (std::size_t i = 0; i <= steps; ++i)
      for (std::size_t k = 0; k < m; ++k) out.value(p, i, k) = values[idx++];

  std::vector<JumpEvent> events;
  if (std::ifstream ev(dir / "events.csv"); ev) {
    std::getline(ev, line);
    detail::chomp(line);
    if (line != "path,component,t,size") throw SpecError("events.csv header must be path,component,t,size");
    line_no = 1;
    while (std::getline(ev, line)) {
      ++line_no;
      detail::chomp(line);
      if (line.empty()) continue;
      const auto cells = detail::split_csv(line);
      if (cells.size() != 4) throw SpecError("events.csv line " + std::to_string(line_no) + ": wrong column count");
      const std::size_t p = detail::to_index(cells[0], line_no);
      const std::size_t c = detail::to_index(cells[1], line_no);
      const double t = detail::to_double(cells[2], line_no);
      const double size = detail::to_double(cells[3], line_no);
      if (c == 0 || c > m) throw SpecError("events.csv line " + std::to_string(line_no) + ": bad component");
      const auto step = static_cast<std::size_t>(std::llround(t / out.dt()));
      events.push_back({p, c - 1, step, size});
    }
  }
  try {
    out.set_events(std::move(events));
  } catch (const SimulationError& e) {
    throw SpecError(std::string("events.csv: ") + e.what());
  }
  return out;
}

}  // namespace locindep::io
