#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "lsl/bounds.hpp"
#include "lsl/datagen.hpp"
#include "lsl/fit.hpp"

namespace lsl {

// run f(i) for i in [0, count) on up to `threads` workers; results are
// written by index so ordering never depends on scheduling
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SweepOptions {
  std::vector<double> sigmas{0.75, 1.0, 1.5};
  std::vector<double> gammas{0.25};
  BoundConstants constants;
  std::size_t padding = 2;
  std::size_t time_count = 96;
  Construction construction = Construction::projected;
  unsigned threads = 1;
};

struct SweepRow {
  double eps = 0.0, alpha = 0.0, A = 0.0;
  std::vector<double> norm_f_bsig;    // ||f_eps|| in B^{-sigma}_{inf,inf}, per sigma
  std::vector<double> norm_u0_b1m2g;  // ||u0|| in B^{-1+2g}_{inf,inf}, per gamma
  std::vector<double> t_fp;           // per gamma
  double norm_d3u0_b32 = 0.0, nb1inf2 = 0.0;
  double q0 = 0.0, q1 = 0.0, t_l = 0.0;
  double div_residual = 0.0, dc_removed = 0.0;
  bool skipped = false;
  std::string note;
};

namespace detail {

inline std::vector<HeatProfile> component_profiles(const SpectralVectorField& u, const TimeGrid& tg,
                                                   std::size_t padding) {
  std::vector<HeatProfile> out;
  for (int c = 0; c < 3; ++c) out.push_back(heat_profile(u[c], Lp::inf, tg, padding));
  return out;
}

inline double max_norm(const std::vector<HeatProfile>& prof, double sigma, Lp q) {
  double m = 0.0;
  for (const auto& p : prof) m = std::max(m, besov_from_profile(p, sigma, q).value);
  return m;
}

}  // namespace detail

inline SweepRow sweep_point(const OscillatoryParams& p, const BumpProfile& phi, const Grid& g,
                            const SweepOptions& opt) {
  SweepRow row;
  row.eps = p.eps;
  row.alpha = p.alpha;
  const TimeGrid tg = TimeGrid::for_grid(g, opt.time_count);
  OscillatoryData data = make_oscillatory_data(p, phi, g, opt.construction);
  row.A = data.amplitude;
  row.div_residual = data.div_residual;
  row.dc_removed = data.dc_removed;

  const ModulatedField f = modulate(phi, p.eps, p.alpha, g);
  const HeatProfile fprof = heat_profile(f.f, Lp::inf, tg, opt.padding);
  for (double s : opt.sigmas) row.norm_f_bsig.push_back(besov_from_profile(fprof, s, Lp::inf).value);

  const auto uprof = detail::component_profiles(data.u0, tg, opt.padding);
  for (double gm : opt.gammas) {
    const double nrm = detail::max_norm(uprof, 1.0 - 2.0 * gm, Lp::inf);
    row.norm_u0_b1m2g.push_back(nrm);
    row.t_fp.push_back(t_fp_from_norm(nrm, gm, opt.constants));
  }
  row.nb1inf2 = detail::max_norm(uprof, 1.0, Lp::two);
  const auto dprof = detail::component_profiles(derivative(data.u0, Axis::x3, 1), tg, opt.padding);
  row.norm_d3u0_b32 = detail::max_norm(dprof, 1.5, Lp::inf);

  const NonlinearQuantities nq = nonlinear_quantities(data.u0, tg, opt.padding);
  row.q0 = nq.q0;
  row.q1 = nq.q1;
  row.t_l = t_l_formula(LifespanInputs{row.q0, row.q1, row.nb1inf2, row.norm_d3u0_b32}, opt.constants);
  return row;
}

// one row per parameter set, in input order; under-resolved points are
// marked skipped with the reason
inline std::vector<SweepRow> family_sweep_values(const std::vector<OscillatoryParams>& params,
                                                 const BumpProfile& phi, const Grid& g, const SweepOptions& opt) {
  opt.constants.validate();
  for (double gm : opt.gammas) check_gamma(gm);
  for (double s : opt.sigmas)
    if (!(s > 0.0)) throw UsageError("sigma must be positive");
  std::vector<SweepRow> rows(params.size());
  parallel_for(params.size(), opt.threads, [&](std::size_t i) {
    try {
      rows[i] = sweep_point(params[i], phi, g, opt);
    } catch (const UsageError& e) {
      rows[i] = SweepRow{};
      rows[i].eps = params[i].eps;
      rows[i].alpha = params[i].alpha;
      rows[i].skipped = true;
      rows[i].note = e.what();
    }
  });
  return rows;
}

struct NamedFit {
  std::string quantity;
  double parameter = 0.0;  // sigma or gamma where relevant
  FitResult fit;
  double expected = 0.0;
};

// Exponent fits over the rows that were computed. Q0, Q1 and t_fp are fitted
// with the amplitude divided out (A^4, A^4 and A^{-1/gamma}); t_l is fitted
// raw.
inline std::vector<NamedFit> sweep_fits(const std::vector<SweepRow>& rows, const SweepOptions& opt, double eta) {
  std::vector<const SweepRow*> ok;
  for (const auto& r : rows)
    if (!r.skipped) ok.push_back(&r);
  if (ok.size() < 3) throw UsageError("fewer than 3 resolved sweep points");
  const double alpha = ok.front()->alpha;
  std::vector<NamedFit> out;
  auto series = [&](auto&& val) {
    std::vector<std::pair<double, double>> pts;
    for (const auto* r : ok) pts.emplace_back(r->eps, val(*r));
    return pts;
  };
  for (std::size_t s = 0; s < opt.sigmas.size(); ++s)
    out.push_back({"norm_f_bsig", opt.sigmas[s], fit_exponent(series([&](const SweepRow& r) { return r.norm_f_bsig[s]; })),
                   opt.sigmas[s]});
  out.push_back({"q0_over_A4", 0.0, fit_exponent(series([](const SweepRow& r) { return r.q0 / std::pow(r.A, 4); })),
                 alpha - 1.0});
  out.push_back({"q1_over_A4", 0.0, fit_exponent(series([](const SweepRow& r) { return r.q1 / std::pow(r.A, 4); })),
                 alpha + 1.0});
  for (std::size_t k = 0; k < opt.gammas.size(); ++k) {
    const double gm = opt.gammas[k];
    out.push_back({"t_fp_times_A_pow", gm,
                   fit_exponent(series([&](const SweepRow& r) { return r.t_fp[k] * std::pow(r.A, 1.0 / gm); })), 2.0});
    out.push_back({"t_fp", gm, fit_exponent(series([&](const SweepRow& r) { return r.t_fp[k]; })), 2.0});
  }
  out.push_back({"norm_d3u0_b32_over_A", 0.0,
                 fit_exponent(series([](const SweepRow& r) { return r.norm_d3u0_b32 / r.A; })), 0.5});
  out.push_back({"t_l", 0.0, fit_exponent(series([](const SweepRow& r) { return r.t_l; })), -2.0 + eta});
  return out;
}

// t_l / t_fp (first gamma) strictly increasing as eps decreases
inline bool ratio_increasing(const std::vector<SweepRow>& rows) {
  std::vector<const SweepRow*> ok;
  for (const auto& r : rows)
    if (!r.skipped) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](const SweepRow* a, const SweepRow* b) { return a->eps > b->eps; });
  for (std::size_t i = 1; i < ok.size(); ++i)
    if (!(ok[i]->t_l / ok[i]->t_fp.front() > ok[i - 1]->t_l / ok[i - 1]->t_fp.front())) return false;
  return !ok.empty();
}

}  // namespace lsl
