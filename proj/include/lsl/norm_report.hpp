#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lsl/lebesgue.hpp"

namespace lsl {

// fixed-width %.12g keeps reruns byte-identical and drops last-bit noise
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct NormEntry {
  std::string space;    // besov, sobolev, lebesgue, bmo, egamma, ...
  double sigma = 0.0;   // sigma or s; 0 where meaningless
  std::string p, q;     // exponents as text; empty where meaningless
  std::string variant;  // heatflow | dyadic | fourier | ...
  double value = 0.0;
  double residual = 0.0;
};

struct NormReport {
  std::vector<NormEntry> entries;
  std::map<std::string, std::string> metadata;

  void add(NormEntry e) {
    if (!std::isfinite(e.value) || e.value < 0.0)
      throw NumericalFailure("non-finite or negative norm value for " + e.space + "/" + e.variant);
    entries.push_back(std::move(e));
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "space,sigma,p,q,variant,value,residual\n";
    for (const auto& e : entries)
      os << e.space << ',' << format_number(e.sigma) << ',' << e.p << ',' << e.q << ',' << e.variant << ','
         << format_number(e.value) << ',' << format_number(e.residual) << '\n';
    return os.str();
  }

  std::string metadata_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : metadata) os << k << " = " << v << '\n';
    return os.str();
  }
};

}  // namespace lsl
