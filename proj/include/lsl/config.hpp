#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lsl/bounds.hpp"
#include "lsl/datagen.hpp"
#include "lsl/solver.hpp"
#include "lsl/time_grid.hpp"

namespace lsl {

// Numbers in config files and on the command line: plain decimals, "a/b",
// and an optional pi factor ("2pi", "7pi/4", "pi").
inline double parse_number(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) throw UsageError("empty number");
  auto plain = [&](const std::string& t) -> double {
    if (t.empty()) return 1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + raw + "'");
    }
    if (used != t.size()) throw UsageError("bad number '" + raw + "'");
    return v;
  };
  auto with_pi = [&](std::string t) {
    double f = 1.0;
    if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
      f = pi;
      t.resize(t.size() - 2);
      if (!t.empty() && t.back() == '*') t.pop_back();
    } else if (t.empty()) {
      throw UsageError("bad number '" + raw + "'");
    }
    return f * plain(t);
  };
  double v;
  if (auto slash = s.find('/'); slash != std::string::npos)
    v = with_pi(s.substr(0, slash)) / plain(s.substr(slash + 1));
  else
    v = with_pi(s);
  if (!std::isfinite(v)) throw UsageError("non-finite number '" + raw + "'");
  return v;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      std::string t;
      for (char d : cur)
        if (d != ' ' && d != '\t') t += d;
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& t : split_list(s)) v.push_back(parse_number(t));
  return v;
}

struct ExperimentConfig {
  // [grid]
  std::size_t n = 32;
  double box = 2.0 * pi;
  std::size_t padding = 2;
  // [time]
  std::size_t time_count = 96;
  // [family]
  std::vector<double> eps;
  double alpha = 0.75;
  std::vector<double> gamma{0.25};
  std::vector<double> sigma{0.75, 1.0, 1.5};
  double kappa = 0.25, eta = 0.5, c0_family = 0.5;
  std::optional<double> frozen_amplitude;
  std::string profile = "compact";
  double width = 0.0;  // compact: support radius (0 = L/8); resolved: x2 width
  std::string construction = "projected";
  // [constants]
  BoundConstants constants;
  // [solver]
  SolverConfig solver;
  // [input]
  std::string field;               // LSL1 file; wins over the generator
  std::string generator = "fixture";
  double amplitude = 1.0;
  int band_lo = 0, band_hi = 1;
  std::vector<std::string> norms;
  bool bmo = true;
  // [output]
  std::string out_dir = ".";
  // [run]
  std::uint64_t seed = 0;
  unsigned threads = 1;

  Grid grid() const { return Grid(n, box); }
  TimeGrid time_grid() const { return TimeGrid::for_grid(grid(), time_count); }

  BumpProfile bump() const {
    if (profile == "compact") return BumpProfile::compact(box, width);
    if (profile == "resolved") return BumpProfile::resolved(box, width > 0.0 ? width : box / 8.0);
    throw UsageError("unknown profile '" + profile + "'");
  }

  OscillatoryParams family_point(double e) const {
    OscillatoryParams p;
    p.eps = e;
    p.alpha = alpha;
    p.kappa = kappa;
    p.eta = eta;
    p.c0_const = c0_family;
    p.frozen_amplitude = frozen_amplitude;
    return p;
  }

  void validate() const {
    (void)grid();
    if (!(box > 0.0)) throw UsageError("box must be positive");
    if (padding < 1 || padding > 4) throw UsageError("padding must be 1..4");
    if (time_count < 64) throw UsageError("time count must be >= 64");
    for (double e : eps)
      if (!(e > 0.0 && e < 1.0)) throw UsageError("eps values must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    for (double g : gamma) check_gamma(g);
    for (double s : sigma)
      if (!(s > 0.0)) throw UsageError("sigma values must be positive");
    if (!(eta > 0.0 && eta < 1.0)) throw UsageError("eta must lie in (0, 1)");
    if (!(kappa > 0.0 && kappa < eta)) throw UsageError("kappa must lie in (0, eta)");
    if (!(c0_family > 0.0)) throw UsageError("family c0 must be positive");
    if (frozen_amplitude && !(*frozen_amplitude > 0.0)) throw UsageError("frozen amplitude must be positive");
    (void)bump();
    (void)parse_construction(construction);
    constants.validate();
    if (!(solver.dt > 0.0) || !(solver.t_end >= 0.0)) throw UsageError("solver needs dt > 0, t_end >= 0");
    if (!(solver.blowup_threshold > 0.0) || !(solver.tail_threshold > 0.0))
      throw UsageError("solver thresholds must be positive");
    if (threads < 1) throw UsageError("threads must be >= 1");
  }
};

namespace detail {

inline std::size_t to_size(const std::string& v, const std::string& key) {
  const double d = parse_number(v);
  if (d < 0.0 || d != std::floor(d) || d > 1e12) throw UsageError(key + " must be a non-negative integer");
  return static_cast<std::size_t>(d);
}

inline bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError(key + " must be true or false");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// one "section.key = value" assignment; unknown keys are an error
inline void apply_setting(ExperimentConfig& c, const std::string& section, const std::string& key,
                          const std::string& value) {
  using detail::to_size;
  const std::string k = section + "." + key;
  const std::string& v = value;
  if (k == "grid.n") c.n = to_size(v, k);
  else if (k == "grid.box") c.box = parse_number(v);
  else if (k == "grid.padding") c.padding = to_size(v, k);
  else if (k == "time.count") c.time_count = to_size(v, k);
  else if (k == "family.eps") c.eps = parse_list(v);
  else if (k == "family.alpha") c.alpha = parse_number(v);
  else if (k == "family.gamma") c.gamma = parse_list(v);
  else if (k == "family.sigma") c.sigma = parse_list(v);
  else if (k == "family.kappa") c.kappa = parse_number(v);
  else if (k == "family.eta") c.eta = parse_number(v);
  else if (k == "family.c0") c.c0_family = parse_number(v);
  else if (k == "family.amplitude") c.frozen_amplitude = parse_number(v);
  else if (k == "family.profile") c.profile = v;
  else if (k == "family.width") c.width = parse_number(v);
  else if (k == "family.construction") c.construction = v;
  else if (k == "constants.c_fp") c.constants.c_fp = parse_number(v);
  else if (k == "constants.c_tl") c.constants.c_tl = parse_number(v);
  else if (k == "constants.k") c.constants.k_apriori = parse_number(v);
  else if (k == "constants.c0") c.constants.c0 = parse_number(v);
  else if (k == "solver.dt") c.solver.dt = parse_number(v);
  else if (k == "solver.t_end") c.solver.t_end = parse_number(v);
  else if (k == "solver.cfl_safety") c.solver.cfl_safety = parse_number(v);
  else if (k == "solver.blowup_threshold") c.solver.blowup_threshold = parse_number(v);
  else if (k == "solver.tail_threshold") c.solver.tail_threshold = parse_number(v);
  else if (k == "solver.keep_every") c.solver.keep_every = to_size(v, k);
  else if (k == "input.field") c.field = v;
  else if (k == "input.generator") c.generator = v;
  else if (k == "input.amplitude") c.amplitude = parse_number(v);
  else if (k == "input.band_lo") c.band_lo = static_cast<int>(std::lround(parse_number(v)));
  else if (k == "input.band_hi") c.band_hi = static_cast<int>(std::lround(parse_number(v)));
  else if (k == "input.norms") c.norms = split_list(v);
  else if (k == "input.bmo") c.bmo = detail::to_bool(v, k);
  else if (k == "output.dir") c.out_dir = v;
  else if (k == "run.seed") c.seed = static_cast<std::uint64_t>(to_size(v, k));
  else if (k == "run.threads") c.threads = static_cast<unsigned>(to_size(v, k));
  else if (section.rfind("constants", 0) == 0 && key.rfind("c_fp@", 0) == 0)
    c.constants.c_fp_by_gamma[parse_number(key.substr(5))] = parse_number(v);  // c_fp@0.25 = ...
  else throw UsageError("unknown config key '" + k + "'");
}

inline void parse_config_text(ExperimentConfig& c, const std::string& text, const std::string& origin = "config") {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + "bad section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected key = value");
    if (section.empty()) throw UsageError(where + "key outside any section");
    try {
      apply_setting(c, section, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  ExperimentConfig c;
  parse_config_text(c, ss.str(), path);
  return c;
}

}  // namespace lsl
