#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chns/mesh.hpp"
#include "chns/params.hpp"

namespace chns {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One run of the command-line driver. Keys mirror the config-file layout:
/// sections [run], [mesh], [grid], [params], [init], [newton], [output],
/// [study], [sweep]; flags override file values.
struct RunConfig {
  std::string mode = "simulate";  // simulate | mms-study | stability-sweep | gronwall-selftest

  int nx = 16, ny = 16;
  Rect rect{0.0, 0.0, 1.0, 1.0};

  TimeGrid grid{0.01, 100};
  PhysParams params{0.1, 1.0, 1.0};
  NewtonOptions newton{1e-11, 30};

  std::string init_mode = "constant";  // constant | random-seed | exact-mms
  double init_value = 1.0;
  std::uint64_t seed = 1;
  std::string mms_name = "trig";

  std::string out_dir = "out";
  int snapshot_every = 10;
  bool write_csv = true;
  bool write_vtk = true;

  std::string study_mode = "temporal";
  double study_T = 0.5;
  std::string study_solution = "trig";
  std::vector<std::pair<int, double>> study_levels;  // (nx, tau); empty = mode default

  std::vector<double> sweep_taus{1e-3, 1e-2, 1e-1, 1.0};
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  if (pos != value.size()) throw ConfigError(key + ": trailing characters in '" + value + "'");
  return v;
}

inline long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  if (pos != value.size()) throw ConfigError(key + ": trailing characters in '" + value + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Apply one "section.key" entry. Unknown keys are rejected with the full
/// key path in the message.
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_int;

  if (key == "run.mode") {
    if (value != "simulate" && value != "mms-study" && value != "stability-sweep" &&
        value != "gronwall-selftest")
      throw ConfigError("run.mode: unknown mode '" + value + "'");
    cfg.mode = value;
  } else if (key == "mesh.nx") {
    cfg.nx = static_cast<int>(parse_int(key, value));
  } else if (key == "mesh.ny") {
    cfg.ny = static_cast<int>(parse_int(key, value));
  } else if (key == "mesh.rect") {
    const auto parts = detail::split_ws(value);
    if (parts.size() != 4) throw ConfigError("mesh.rect: expected 'x0 y0 x1 y1'");
    cfg.rect = {parse_double(key, parts[0]), parse_double(key, parts[1]), parse_double(key, parts[2]),
                parse_double(key, parts[3])};
  } else if (key == "grid.tau") {
    cfg.grid.tau = parse_double(key, value);
  } else if (key == "grid.steps") {
    cfg.grid.step_count = static_cast<int>(parse_int(key, value));
  } else if (key == "params.epsilon") {
    cfg.params.epsilon = parse_double(key, value);
  } else if (key == "params.eta") {
    cfg.params.eta = parse_double(key, value);
  } else if (key == "params.gamma") {
    cfg.params.gamma = parse_double(key, value);
  } else if (key == "init.mode") {
    const auto colon = value.find(':');
    const std::string kind = value.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : value.substr(colon + 1);
    if (kind == "constant") {
      cfg.init_mode = "constant";
      if (!arg.empty()) cfg.init_value = parse_double(key, arg);
    } else if (kind == "random-seed") {
      cfg.init_mode = "random-seed";
      if (!arg.empty()) cfg.seed = static_cast<std::uint64_t>(parse_int(key, arg));
    } else if (kind == "exact-mms") {
      cfg.init_mode = "exact-mms";
      if (!arg.empty()) cfg.mms_name = arg;
    } else {
      throw ConfigError("init.mode: expected constant:<v>, random-seed:<n> or exact-mms:<name>");
    }
  } else if (key == "newton.tol") {
    cfg.newton.tol = parse_double(key, value);
  } else if (key == "newton.max_iters") {
    cfg.newton.max_iters = static_cast<int>(parse_int(key, value));
  } else if (key == "output.directory") {
    cfg.out_dir = value;
  } else if (key == "output.snapshot_every") {
    cfg.snapshot_every = static_cast<int>(parse_int(key, value));
  } else if (key == "output.formats") {
    cfg.write_csv = cfg.write_vtk = false;
    for (const auto& f : detail::split_ws(value)) {
      if (f == "csv")
        cfg.write_csv = true;
      else if (f == "vtk")
        cfg.write_vtk = true;
      else
        throw ConfigError("output.formats: unknown format '" + f + "'");
    }
  } else if (key == "study.mode") {
    if (value != "temporal" && value != "spatial" && value != "coupled")
      throw ConfigError("study.mode: unknown mode '" + value + "'");
    cfg.study_mode = value;
  } else if (key == "study.T") {
    cfg.study_T = parse_double(key, value);
  } else if (key == "study.solution") {
    cfg.study_solution = value;
  } else if (key == "study.levels") {
    cfg.study_levels.clear();
    for (const auto& pair : detail::split_ws(value)) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw ConfigError("study.levels: expected 'nx:tau' entries");
      cfg.study_levels.emplace_back(static_cast<int>(parse_int(key, pair.substr(0, colon))),
                                    parse_double(key, pair.substr(colon + 1)));
    }
  } else if (key == "sweep.taus") {
    cfg.sweep_taus.clear();
    for (const auto& v : detail::split_ws(value)) cfg.sweep_taus.push_back(parse_double(key, v));
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

/// Key-value file with [section] headers; '#' and ';' start comments.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": key outside any section");
    apply_key(cfg, section + "." + key, value);
  }
}

inline void validate(const RunConfig& cfg) {
  if (cfg.nx < 1 || cfg.ny < 1) throw ConfigError("mesh.nx/mesh.ny must be >= 1");
  if (!(cfg.rect.x1 > cfg.rect.x0) || !(cfg.rect.y1 > cfg.rect.y0))
    throw ConfigError("mesh.rect is degenerate");
  try {
    validate(cfg.params);
    validate(cfg.grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.newton.tol > 0.0)) throw ConfigError("newton.tol must be positive");
  if (cfg.newton.max_iters < 1) throw ConfigError("newton.max_iters must be >= 1");
  if (cfg.snapshot_every < 1) throw ConfigError("output.snapshot_every must be >= 1");
  if (!(cfg.study_T > 0.0)) throw ConfigError("study.T must be positive");
  for (const auto& [nx, tau] : cfg.study_levels)
    if (nx < 1 || !(tau > 0.0)) throw ConfigError("study.levels entries must have nx >= 1 and tau > 0");
  for (double tau : cfg.sweep_taus)
    if (!(tau > 0.0)) throw ConfigError("sweep.taus must be positive");
}

}  // namespace chns
