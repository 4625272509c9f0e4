#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "lsl/besov.hpp"

namespace lsl {

using ScalarSamples = std::vector<std::pair<double, SpectralField>>;

// sup_j 2^{-j(1-2g)} ( sup_t ||D_j f||_inf + 2^{2j} int_0^T ||D_j f||_inf dt ),
// time integral by trapezoid over the given samples with t <= T
inline double egamma_norm(const ScalarSamples& samples, double gamma, double T, const LPFilterBank& bank,
                          std::size_t padding = 2) {
  if (samples.empty()) throw UsageError("E^gamma norm of an empty trajectory");
  if (!(gamma > 0.0 && gamma < 0.5)) throw UsageError("E^gamma norm needs 0 < gamma < 1/2");
  std::vector<const std::pair<double, SpectralField>*> used;
  for (const auto& s : samples)
    if (s.first <= T * (1.0 + 1e-12)) used.push_back(&s);
  if (used.empty()) throw UsageError("no trajectory samples inside [0, T]");
  for (std::size_t i = 1; i < used.size(); ++i)
    if (!(used[i]->first > used[i - 1]->first)) throw UsageError("trajectory times must increase");

  double best = 0.0;
  std::vector<double> sup(used.size());
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    for (std::size_t i = 0; i < used.size(); ++i) {
      const SpectralField& f = used[i]->second;
      sup[i] = f.is_zero() ? 0.0 : lebesgue_norm(bank.block(f, j), Lp::inf, padding);
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < used.size(); ++i)
      integral += 0.5 * (used[i]->first - used[i - 1]->first) * (sup[i] + sup[i - 1]);
    const double peak = *std::max_element(sup.begin(), sup.end());
    best = std::max(best, std::pow(2.0, -j * (1.0 - 2.0 * gamma)) * (peak + std::pow(4.0, j) * integral));
  }
  return best;
}

// samples of e^{t Lap} a at the given times
inline ScalarSamples heat_samples(const SpectralField& a, const std::vector<double>& times) {
  ScalarSamples out;
  out.reserve(times.size());
  for (double t : times) out.emplace_back(t, heat_flow(a, t));
  return out;
}

}  // namespace lsl
