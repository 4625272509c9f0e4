#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lsl/bounds.hpp"

namespace lsl {

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_safety = 0.0;         // > 0: dt capped by cfl_safety * h / max|u|
  double blowup_threshold = 1e6;   // on ||grad u||_2
  double tail_threshold = 1e-6;    // outer-shell energy / peak shell energy
  std::size_t keep_every = 0;      // keep the field every k steps (0: first and last only)

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("solver dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw UsageError("solver t_end must be positive");
    if (cfl_safety < 0.0) throw UsageError("cfl_safety must be >= 0");
    if (!(blowup_threshold > 0.0) || !(tail_threshold > 0.0)) throw UsageError("solver thresholds must be positive");
  }
};

struct LedgerRow {
  double t = 0.0;
  double kinetic = 0.0;          // 1/2 ||u||^2
  double dissipation = 0.0;      // int ||grad u||^2
  double w_l2_scaled = 0.0;      // ||w||^2 / t^{1/2}
  double w_integral = 0.0;       // int ||w||^2/(2 t^{3/2}) + ||grad w||^2 / t^{1/2}
  double d3w_l2 = 0.0;           // ||d3 w||^2
  double d3w_dissipation = 0.0;  // int ||grad d3 w||^2
  double w_l2 = 0.0;             // ||w||, not serialized
  double grad_l2 = 0.0;          // ||grad u||, not serialized
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;

  std::string to_csv() const {
    std::ostringstream os;
    os << "t,kinetic,dissipation,w_l2_scaled,w_integral,d3w_l2,d3w_dissipation\n";
    for (const auto& r : rows)
      os << format_number(r.t) << ',' << format_number(r.kinetic) << ',' << format_number(r.dissipation) << ','
         << format_number(r.w_l2_scaled) << ',' << format_number(r.w_integral) << ',' << format_number(r.d3w_l2)
         << ',' << format_number(r.d3w_dissipation) << '\n';
    return os.str();
  }
};

struct Trajectory {
  std::vector<std::pair<double, SpectralVectorField>> samples;
  EnergyLedger ledger;
  bool lost_resolution = false;
  double loss_time = 0.0;
  std::string loss_reason;
};

namespace detail {

struct FluctuationNorms {
  double w2 = 0.0, grad_w2 = 0.0, d3w2 = 0.0, grad_d3w2 = 0.0, grad_u2 = 0.0;
};

// norms of u and of w = u - e^{t Lap} u0 in one spectral pass
inline FluctuationNorms fluctuation_norms(const SpectralVectorField& u, const SpectralVectorField& u0, double t) {
  FluctuationNorms f;
  for_each_mode(u.grid(), [&](const Mode& m) {
    const double e = std::exp(-t * m.k2());
    double uu = 0.0, ww = 0.0;
    for (int c = 0; c < 3; ++c) {
      const cplx uc = u[c][m.index];
      uu += std::norm(uc);
      ww += std::norm(uc - e * u0[c][m.index]);
    }
    const double k2 = m.k2(), k32 = m.k[2] * m.k[2];
    f.w2 += m.weight * ww;
    f.grad_w2 += m.weight * k2 * ww;
    f.d3w2 += m.weight * k32 * ww;
    f.grad_d3w2 += m.weight * k2 * k32 * ww;
    f.grad_u2 += m.weight * k2 * uu;
  });
  const double v = u.grid().volume();
  f.w2 *= v;
  f.grad_w2 *= v;
  f.d3w2 *= v;
  f.grad_d3w2 *= v;
  f.grad_u2 *= v;
  return f;
}

inline double w_integrand(const FluctuationNorms& f, double t) {
  if (t <= 0.0) return 0.0;  // w = O(t): integrand O(t^{1/2})
  return f.w2 / (2.0 * t * std::sqrt(t)) + f.grad_w2 / std::sqrt(t);
}

inline void require_finite(const SpectralVectorField& u) {
  for (int c = 0; c < 3; ++c)
    for (const auto& z : u[c].coeffs())
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalFailure("non-finite state");
}

inline double tail_ratio(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  const std::size_t shells = g.n();
  std::vector<double> e(shells, 0.0);
  for_each_mode(g, [&](const Mode& m) {
    const auto s = static_cast<std::size_t>(std::lround(std::sqrt(m.k2()) / g.k_unit()));
    if (s >= shells) return;
    e[s] += m.weight * (std::norm(u[0][m.index]) + std::norm(u[1][m.index]) + std::norm(u[2][m.index]));
  });
  const double peak = *std::max_element(e.begin(), e.end());
  if (peak == 0.0) return 0.0;
  const auto cut = static_cast<std::size_t>(0.9 * static_cast<double>(g.n() / 3));
  double tail = 0.0;
  for (std::size_t s = cut; s < shells; ++s) tail = std::max(tail, e[s]);
  return tail / peak;
}

struct StepStages {
  SpectralVectorField next, ua, ub, uc;
};

inline SpectralVectorField nonlinear_term(const SpectralVectorField& u) {
  SpectralVectorField n = leray_project(advect(u));
  n *= -1.0;
  return n;
}

// Lawson (integrating-factor) RK4; the heat factor is exact
inline StepStages step_stages(const SpectralVectorField& u, double h) {
  const SpectralVectorField k1 = nonlinear_term(u);
  SpectralVectorField ua = heat_flow(u + (0.5 * h) * k1, 0.5 * h);
  const SpectralVectorField k2 = nonlinear_term(ua);
  const SpectralVectorField eu_half = heat_flow(u, 0.5 * h);
  SpectralVectorField ub = eu_half + (0.5 * h) * k2;
  const SpectralVectorField k3 = nonlinear_term(ub);
  const SpectralVectorField eu = heat_flow(u, h);
  SpectralVectorField uc = eu + h * heat_flow(k3, 0.5 * h);
  const SpectralVectorField k4 = nonlinear_term(uc);
  SpectralVectorField next = eu + (h / 6.0) * (heat_flow(k1, h) + 2.0 * heat_flow(k2 + k3, 0.5 * h) + k4);
  next.mark_divergence_free(u.divergence_free());
  require_finite(next);
  return {std::move(next), std::move(ua), std::move(ub), std::move(uc)};
}

}  // namespace detail

inline SpectralVectorField step(const SpectralVectorField& u, double dt) {
  if (!(dt > 0.0)) throw UsageError("step needs dt > 0");
  return detail::step_stages(u, dt).next;
}

inline Trajectory integrate(const SpectralVectorField& u0, const SolverConfig& cfg) {
  cfg.validate();
  require_divergence_free(u0, "integrate");
  Trajectory tr;
  SpectralVectorField u = u0;
  u.mark_divergence_free(true);

  auto row_at = [&](double t, const SpectralVectorField& v, const LedgerRow* prev, double dd, double dw, double dd3) {
    const auto f = detail::fluctuation_norms(v, u0, t);
    LedgerRow r;
    r.t = t;
    r.kinetic = 0.5 * l2_norm_sq(v);
    r.dissipation = (prev ? prev->dissipation : 0.0) + dd;
    r.w_l2_scaled = t > 0.0 ? f.w2 / std::sqrt(t) : 0.0;
    r.w_integral = (prev ? prev->w_integral : 0.0) + dw;
    r.d3w_l2 = f.d3w2;
    r.d3w_dissipation = (prev ? prev->d3w_dissipation : 0.0) + dd3;
    r.w_l2 = std::sqrt(f.w2);
    r.grad_l2 = std::sqrt(f.grad_u2);
    return r;
  };

  tr.ledger.rows.push_back(row_at(0.0, u, nullptr, 0.0, 0.0, 0.0));
  tr.samples.emplace_back(0.0, u);

  const double umax_scale = u0.grid().spacing();
  std::size_t steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  if (steps == 0 || std::abs(static_cast<double>(steps) * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end)
    steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt));
  const double h_fixed = cfg.t_end / static_cast<double>(steps);

  double t = 0.0;
  std::size_t count = 0;
  while (t < cfg.t_end * (1.0 - 1e-14)) {
    double h = h_fixed;
    if (cfg.cfl_safety > 0.0) {
      double umax = 0.0;
      for (int c = 0; c < 3; ++c) umax = std::max(umax, l1_coeff_bound(u[c]));
      if (umax > 0.0) h = std::min(h, cfg.cfl_safety * umax_scale / umax);
    }
    // land exactly on t_end
    if (cfg.t_end - (t + h) < 1e-12 * cfg.t_end) h = cfg.t_end - t;
    if (cfg.cfl_safety == 0.0 && count + 1 == steps) h = cfg.t_end - t;

    std::optional<detail::StepStages> st;
    try {
      st.emplace(detail::step_stages(u, h));
    } catch (const NumericalFailure& e) {
      tr.lost_resolution = true;
      tr.loss_time = t;
      tr.loss_reason = e.what();
      break;
    }
    const double th = t + 0.5 * h, t1 = t + h;
    const auto f0 = detail::fluctuation_norms(u, u0, t);
    const auto fa = detail::fluctuation_norms(st->ua, u0, th);
    const auto fb = detail::fluctuation_norms(st->ub, u0, th);
    const auto fc = detail::fluctuation_norms(st->uc, u0, t1);
    const double w6 = h / 6.0;
    const double dd = w6 * (f0.grad_u2 + 2.0 * fa.grad_u2 + 2.0 * fb.grad_u2 + fc.grad_u2);
    const double dw = w6 * (detail::w_integrand(f0, t) + 2.0 * detail::w_integrand(fa, th) +
                            2.0 * detail::w_integrand(fb, th) + detail::w_integrand(fc, t1));
    const double dd3 = w6 * (f0.grad_d3w2 + 2.0 * fa.grad_d3w2 + 2.0 * fb.grad_d3w2 + fc.grad_d3w2);

    u = std::move(st->next);
    t = t1;
    ++count;
    const LedgerRow prev = tr.ledger.rows.back();
    tr.ledger.rows.push_back(row_at(t, u, &prev, dd, dw, dd3));

    const bool last = t >= cfg.t_end * (1.0 - 1e-14);
    if (last || (cfg.keep_every > 0 && count % cfg.keep_every == 0)) tr.samples.emplace_back(t, u);

    const LedgerRow& r = tr.ledger.rows.back();
    std::string why;
    if (r.grad_l2 > cfg.blowup_threshold) why = "gradient norm above threshold";
    else if (detail::tail_ratio(u) > cfg.tail_threshold) why = "spectral tail above threshold";
    if (!why.empty()) {
      tr.lost_resolution = true;
      tr.loss_time = t;
      tr.loss_reason = why;
      if (tr.samples.back().first != t) tr.samples.emplace_back(t, u);
      break;
    }
  }
  return tr;
}

// max_t |E(u(t)) - E(0)| / E(0) with E = 1/2||u||^2 + int ||grad u||^2
inline double energy_identity_check(const Trajectory& tr) {
  if (tr.ledger.rows.empty()) throw UsageError("empty trajectory");
  const double e0 = tr.ledger.rows.front().kinetic;
  if (e0 == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& r : tr.ledger.rows) worst = std::max(worst, std::abs(r.kinetic + r.dissipation - e0) / e0);
  return worst;
}

inline bool leray_inequality_holds(const Trajectory& tr, double slack = 1e-6) {
  if (tr.ledger.rows.empty()) return true;
  const double e0 = tr.ledger.rows.front().kinetic;
  return std::all_of(tr.ledger.rows.begin(), tr.ledger.rows.end(),
                     [&](const LedgerRow& r) { return r.kinetic + r.dissipation <= e0 * (1.0 + slack); });
}

struct RatioReport {
  double ratio = 0.0;      // sup_t LHS(t)/RHS(t)
  double lhs = 0.0;        // LHS at the maximizing sample
  double rhs = 0.0;        // RHS at the maximizing sample
  double t_at = 0.0;
  bool within = true;      // ratio <= c_check
  bool consistent = true;  // false when RHS = 0 but LHS is not negligible
};

struct LinearFlowInputs {
  LifespanInputs in;
  static LinearFlowInputs compute(const SpectralVectorField& u0, const TimeGrid& tg, std::size_t padding = 2) {
    LinearFlowInputs r;
    const auto nq = nonlinear_quantities(u0, tg, padding);
    r.in.q0 = nq.q0;
    r.in.q1 = nq.q1;
    r.in.nb1inf2 = besov_norm_heat(u0, 1.0, Lp::inf, Lp::two, tg, padding).value;
    r.in.nd3b32 = besov_norm_heat(derivative(u0, Axis::x3, 1), 1.5, Lp::inf, Lp::inf, tg, padding).value;
    return r;
  }
};

namespace detail {

template <class L, class R>
RatioReport ratio_over_ledger(const Trajectory& tr, L&& lhs, R&& rhs, double c_check, double scale) {
  RatioReport rep;
  double worst_lhs = 0.0;
  for (std::size_t i = 0; i < tr.ledger.rows.size(); ++i) {
    const double l = lhs(i), r = rhs(i);
    worst_lhs = std::max(worst_lhs, l);
    if (r > 0.0 && l / r > rep.ratio) {
      rep.ratio = l / r;
      rep.lhs = l;
      rep.rhs = r;
      rep.t_at = tr.ledger.rows[i].t;
    }
    if (r == 0.0 && l > 1e-12 * std::max(scale, 1e-300)) rep.consistent = false;
  }
  if (!rep.consistent) rep.ratio = infinity;
  rep.within = rep.ratio <= c_check;
  return rep;
}

}  // namespace detail

// ||w||^2/t^{1/2} + int (||w||^2/(2t^{3/2}) + ||grad w||^2/t^{1/2})  vs  Q0 exp(||u0||^2_{B^-1_{inf,2}})
inline RatioReport fluctuation_check(const Trajectory& tr, const LinearFlowInputs& lin, double c_check = 10.0) {
  const double rhs = lin.in.q0 * std::exp(lin.in.nb1inf2 * lin.in.nb1inf2);
  const double scale = tr.ledger.rows.empty() ? 0.0 : tr.ledger.rows.front().kinetic;
  return detail::ratio_over_ledger(
      tr, [&](std::size_t i) { return tr.ledger.rows[i].w_l2_scaled + tr.ledger.rows[i].w_integral; },
      [&](std::size_t) { return rhs; }, c_check, scale);
}

inline RatioReport fluctuation_check(const Trajectory& tr, const SpectralVectorField& u0, const TimeGrid& tg,
                                     double c_check = 10.0) {
  return fluctuation_check(tr, LinearFlowInputs::compute(u0, tg), c_check);
}

// 1/2||d3 w||^2 + int ||grad d3 w||^2  vs
// (Q0 (t^{1/2} sup ||d3 w||^4 + nd3^2) + sqrt(Q0 Q1)) exp(2 nb^2)
inline RatioReport d3_energy_check(const Trajectory& tr, const LinearFlowInputs& lin, double c_check = 10.0) {
  const auto& in = lin.in;
  const double ex = std::exp(2.0 * in.nb1inf2 * in.nb1inf2);
  std::vector<double> sup4(tr.ledger.rows.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < tr.ledger.rows.size(); ++i) {
    running = std::max(running, tr.ledger.rows[i].d3w_l2 * tr.ledger.rows[i].d3w_l2);
    sup4[i] = running;
  }
  const double scale = tr.ledger.rows.empty() ? 0.0 : tr.ledger.rows.front().kinetic;
  return detail::ratio_over_ledger(
      tr, [&](std::size_t i) { return 0.5 * tr.ledger.rows[i].d3w_l2 + tr.ledger.rows[i].d3w_dissipation; },
      [&](std::size_t i) {
        const double t = tr.ledger.rows[i].t;
        return (in.q0 * (std::sqrt(t) * sup4[i] + in.nd3b32 * in.nd3b32) + std::sqrt(in.q0 * in.q1)) * ex;
      },
      c_check, scale);
}

inline RatioReport d3_energy_check(const Trajectory& tr, const SpectralVectorField& u0, const TimeGrid& tg,
                                   double c_check = 10.0) {
  return d3_energy_check(tr, LinearFlowInputs::compute(u0, tg), c_check);
}

// lambda u0(lambda x) by relabelling k -> lambda k. Modes pushed past the
// dealiased band are an error unless truncate is set, in which case they
// are dropped.
inline SpectralVectorField rescale(const SpectralVectorField& u0, int lambda, bool truncate = false) {
  if (lambda < 1) throw UsageError("rescale needs an integer lambda >= 1");
  const Grid& g = u0.grid();
  SpectralVectorField out(g);
  const long lim = static_cast<long>(g.n() / 3);
  const double noise = 1e-14 * u0.max_abs();  // FFT roundoff of sampled data
  for_each_mode(g, [&](const Mode& m) {
    bool any = false;
    for (int c = 0; c < 3; ++c) any = any || std::abs(u0[c][m.index]) > noise;
    if (!any) return;
    const long s0 = g.signed_index(m.i0) * lambda, s1 = g.signed_index(m.i1) * lambda;
    const long s2 = static_cast<long>(m.i2) * lambda;
    if (std::labs(s0) > lim || std::labs(s1) > lim || s2 > lim) {
      if (truncate) return;
      throw UsageError("rescaled data leave the dealiased band; refine the grid");
    }
    const std::size_t dst = g.index(g.slot(s0), g.slot(s1), static_cast<std::size_t>(s2));
    for (int c = 0; c < 3; ++c) out[c][dst] = static_cast<double>(lambda) * u0[c][m.index];
  });
  out.mark_divergence_free(u0.divergence_free());
  return out;
}

// Solve from u0 and from lambda u0(lambda .) with dt/lambda^2 up to
// t_end/lambda^2, compare lambda u(lambda^2 t, lambda x) with the second run
// at the stored times; max relative L^2 discrepancy.
inline double scaling_equivariance_check(const SpectralVectorField& u0, int lambda, const SolverConfig& cfg) {
  if (lambda == 1) return 0.0;
  const SpectralVectorField v0 = rescale(u0, lambda);
  const Trajectory a = integrate(u0, cfg);
  SolverConfig c2 = cfg;
  const double l2 = static_cast<double>(lambda) * lambda;
  c2.dt = cfg.dt / l2;
  c2.t_end = cfg.t_end / l2;
  const Trajectory b = integrate(v0, c2);
  if (a.lost_resolution || b.lost_resolution) throw NumericalFailure("equivariance run lost resolution");
  if (a.samples.size() != b.samples.size()) throw NumericalFailure("equivariance runs sampled differently");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const SpectralVectorField expect = rescale(a.samples[i].second, lambda, true);
    // whatever the relabelling dropped counts as discrepancy
    const double full = l2 * l2_norm_sq(a.samples[i].second);
    const double kept = l2_norm_sq(expect);
    const double ref = std::sqrt(full);
    const double diff = std::sqrt(l2_norm_sq(expect - b.samples[i].second) + std::max(0.0, full - kept));
    if (ref > 0.0) worst = std::max(worst, diff / ref);
    else worst = std::max(worst, diff);
  }
  return worst;
}

}  // namespace lsl
