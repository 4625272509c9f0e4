#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lsl/bmo.hpp"
#include "lsl/norm_report.hpp"

namespace lsl {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Existence-only constants from the estimates; unit values by default.
struct BoundConstants {
  double c_fp = 1.0;                      // c'_gamma unless overridden per gamma
  std::map<double, double> c_fp_by_gamma;
  double c_tl = 1.0;                      // C in T_L
  double k_apriori = 1.0;                 // K in T_*
  double c0 = 1.0;                        // BMO^-1 smallness threshold

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string("constant ") + name + " must be positive");
    };
    pos(c_fp, "c_fp");
    pos(c_tl, "c_tl");
    pos(k_apriori, "k");
    pos(c0, "c0");
    for (const auto& [g, c] : c_fp_by_gamma) pos(c, "c_fp(gamma)");
  }
  double c_fp_for(double gamma) const {
    auto it = c_fp_by_gamma.find(gamma);
    return it != c_fp_by_gamma.end() ? it->second : c_fp;
  }
};

struct NonlinearQuantities {
  double q0 = 0.0, q1 = 0.0;
  double q0_residual = 0.0, q1_residual = 0.0;
  std::vector<double> t;       // sample times
  std::vector<double> i0, i1;  // t^{1/2}||P(uL.grad uL)||^2 and t^{3/2}||d3^2 P(...)||^2
  std::size_t skipped = 0;
};

inline void require_divergence_free(const SpectralVectorField& u0, const char* what) {
  for (int i = 0; i < 3; ++i)
    if (detail::has_mean(u0[i])) throw UsageError(std::string(what) + " needs mean-zero data");
  if (divergence_residual(u0) > 1e-8) throw UsageError(std::string(what) + " needs divergence-free data");
}

// Q0 and Q1 by log-trapezoid over the TimeGrid. The product u_L.grad u_L is
// formed exactly on a padded grid. Samples where a cheap Holder bound shows
// the integrand is below 1e-14 of the running peak are not transformed; the
// bound goes to the residual instead.
inline NonlinearQuantities nonlinear_quantities(const SpectralVectorField& u0, const TimeGrid& tg,
                                                std::size_t padding = 2) {
  require_divergence_free(u0, "Q0/Q1");
  NonlinearQuantities out;
  out.t = tg.samples();
  const std::size_t nt = out.t.size();
  out.i0.assign(nt, 0.0);
  out.i1.assign(nt, 0.0);
  if (u0.is_zero()) return out;

  const Grid& g = u0.grid();
  const double vol = g.volume();
  double kmin = infinity;
  for_each_mode(g, [&](const Mode& m) {
    if (m.k2() > 0.0 && (u0[0][m.index] != cplx{} || u0[1][m.index] != cplx{} || u0[2][m.index] != cplx{}))
      kmin = std::min(kmin, m.k2());
  });

  double peak0 = 0.0, peak1 = 0.0;
  std::vector<double> j0(nt, 0.0), j1(nt, 0.0), b0(nt, 0.0), b1(nt, 0.0);
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = out.t[it];
    // S[a][j] = sum |k3|^a |c_j|,  T[b][j] = ||d3^b d_j u||_2^2
    double S[3][3] = {}, T[3][3] = {};
    for_each_mode(g, [&](const Mode& m) {
      const double e = std::exp(-t * m.k2());
      double e2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double a = std::abs(u0[c][m.index]);
        if (a == 0.0) continue;
        e2 += a * a;
        const double k3 = std::abs(m.k[2]);
        S[0][c] += m.weight * e * a;
        S[1][c] += m.weight * e * a * k3;
        S[2][c] += m.weight * e * a * k3 * k3;
      }
      if (e2 == 0.0) return;
      const double w = m.weight * e * e * e2;
      const double k32 = m.k[2] * m.k[2];
      for (int j = 0; j < 3; ++j) {
        const double kj2 = m.k[j] * m.k[j];
        T[0][j] += w * kj2;
        T[1][j] += w * kj2 * k32;
        T[2][j] += w * kj2 * k32 * k32;
      }
    });
    double bound0 = 0.0, bound1 = 0.0;
    for (int j = 0; j < 3; ++j) {
      bound0 += S[0][j] * std::sqrt(vol * T[0][j]);
      bound1 += S[2][j] * std::sqrt(vol * T[0][j]) + 2.0 * S[1][j] * std::sqrt(vol * T[1][j]) +
                S[0][j] * std::sqrt(vol * T[2][j]);
    }
    b0[it] = t * std::sqrt(t) * bound0 * bound0;
    b1[it] = t * t * std::sqrt(t) * bound1 * bound1;
    if (b0[it] <= 1e-14 * peak0 && b1[it] <= 1e-14 * peak1) {
      ++out.skipped;
      continue;
    }
    const SpectralVectorField p = leray_project(advect_padded(heat_flow(u0, t), padding));
    double n1 = 0.0;
    for_each_mode(p.grid(), [&](const Mode& m) {
      const double k34 = m.k[2] * m.k[2] * m.k[2] * m.k[2];
      if (k34 == 0.0) return;
      n1 += m.weight * k34 * (std::norm(p[0][m.index]) + std::norm(p[1][m.index]) + std::norm(p[2][m.index]));
    });
    const double n0 = l2_norm_sq(p);
    n1 *= vol;
    if (!std::isfinite(n0) || !std::isfinite(n1)) throw NumericalFailure("non-finite Q integrand");
    out.i0[it] = std::sqrt(t) * n0;
    out.i1[it] = t * std::sqrt(t) * n1;
    j0[it] = t * out.i0[it];
    j1[it] = t * out.i1[it];
    peak0 = std::max(peak0, j0[it]);
    peak1 = std::max(peak1, j1[it]);
  }

  const double ds = tg.log_step();
  double s0 = 0.0, s1 = 0.0, r0 = 0.0, r1 = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    const double w = (it == 0 || it + 1 == nt) ? 0.5 * ds : ds;
    s0 += w * j0[it];
    s1 += w * j1[it];
    if (j0[it] == 0.0 && j1[it] == 0.0 && b0[it] + b1[it] > 0.0) {
      r0 += w * b0[it];
      r1 += w * b1[it];
    }
  }
  // below t_min the integrands behave like t^{1/2} and t^{3/2}
  s0 += out.i0.front() * out.t.front() / 1.5;
  s1 += out.i1.front() * out.t.front() / 2.5;
  if (std::isfinite(kmin)) {
    r0 += out.i0.back() / (4.0 * kmin);
    r1 += out.i1.back() / (4.0 * kmin);
  }
  out.q0 = s0;
  out.q1 = s1;
  out.q0_residual = r0;
  out.q1_residual = r1;
  return out;
}

inline double q0(const SpectralVectorField& u0, const TimeGrid& tg) { return nonlinear_quantities(u0, tg).q0; }
inline double q1(const SpectralVectorField& u0, const TimeGrid& tg) { return nonlinear_quantities(u0, tg).q1; }

inline void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw UsageError("gamma must lie in (0, 1/2)");
}

// c'_g ||u0||^{-1/g}; zero norm gives +inf
inline double t_fp_from_norm(double norm, double gamma, const BoundConstants& c) {
  check_gamma(gamma);
  if (norm == 0.0) return infinity;
  return c.c_fp_for(gamma) * std::pow(norm, -1.0 / gamma);
}

struct TfpValue {
  double gamma = 0.0;
  double norm = 0.0;  // ||u0|| in B^{-1+2g}_{inf,inf}, max over components
  double value = 0.0;
  bool infinite = false;
};

inline TfpValue t_fp(const SpectralVectorField& u0, double gamma, const BoundConstants& c, const TimeGrid& tg,
                     std::size_t padding = 2) {
  check_gamma(gamma);
  TfpValue v;
  v.gamma = gamma;
  v.norm = besov_norm_heat(u0, 1.0 - 2.0 * gamma, Lp::inf, Lp::inf, tg, padding).value;
  v.value = t_fp_from_norm(v.norm, gamma, c);
  v.infinite = std::isinf(v.value);
  return v;
}

struct LifespanInputs {
  double q0 = 0.0, q1 = 0.0;
  double nb1inf2 = 0.0;  // ||u0|| in B^-1_{inf,2}
  double nd3b32 = 0.0;   // ||d3 u0|| in B^{-3/2}_{inf,inf}
};

// C Q0^-2 (nd3^2 Q0 + sqrt(Q0 Q1))^-2 exp(-4 nb^2)
inline double t_l_formula(const LifespanInputs& in, const BoundConstants& c) {
  if (in.q0 == 0.0) return infinity;
  const double x = in.nd3b32 * in.nd3b32 * in.q0 + std::sqrt(in.q0 * in.q1);
  return c.c_tl / (in.q0 * in.q0 * x * x) * std::exp(-4.0 * in.nb1inf2 * in.nb1inf2);
}

struct MlTstar {
  double m_l = 0.0;
  double t_star = infinity;
};

// M_L = (nd3^2 Q0 + sqrt(Q0 Q1)) exp(2 nb^2),  T_* = (8 K^2 Q0 M_L)^-2
inline MlTstar m_l_and_t_star_formula(const LifespanInputs& in, const BoundConstants& c) {
  MlTstar r;
  r.m_l = (in.nd3b32 * in.nd3b32 * in.q0 + std::sqrt(in.q0 * in.q1)) * std::exp(2.0 * in.nb1inf2 * in.nb1inf2);
  const double d = 8.0 * c.k_apriori * c.k_apriori * in.q0 * r.m_l;
  r.t_star = d == 0.0 ? infinity : 1.0 / (d * d);
  return r;
}

// the exponentials cancel: T_L / T_* = C (8 K^2)^2 for any data with Q0 > 0
inline double t_l_over_t_star(const BoundConstants& c) {
  const double k = 8.0 * c.k_apriori * c.k_apriori;
  return c.c_tl * k * k;
}

struct KtVerdict {
  bool small = true;
  double margin = 0.0;  // ||u0||_{BMO^-1} / c0
  BmoValue bmo;
};

inline KtVerdict kt_smallness(const SpectralVectorField& u0, const BoundConstants& c, const TimeGrid& tg,
                              const BmoOptions& opt = {}) {
  KtVerdict v;
  v.bmo = bmo_inv_norm(u0, tg, opt);
  v.margin = v.bmo.total / c.c0;
  v.small = v.bmo.total <= c.c0;
  return v;
}

struct BoundReport {
  NonlinearQuantities nq;
  LifespanInputs inputs;
  std::vector<TfpValue> t_fp;
  double t_l = infinity;
  std::string t_l_flag;  // "linear-flow regime" when Q0 = 0
  MlTstar ml;
  std::optional<KtVerdict> kt;
  std::optional<double> eps, alpha;
  std::map<std::string, std::string> metadata;

  static std::string csv_header() { return "eps,alpha,gamma,q0,q1,nb1inf2,nd3b32,t_fp,t_l,t_star,kt_small,kt_margin\n"; }

  std::string csv_rows() const {
    std::ostringstream os;
    const std::string e = eps ? format_number(*eps) : "";
    const std::string a = alpha ? format_number(*alpha) : "";
    const std::string ks = kt ? (kt->small ? "true" : "false") : "";
    const std::string km = kt ? format_number(kt->margin) : "";
    for (const auto& f : t_fp)
      os << e << ',' << a << ',' << format_number(f.gamma) << ',' << format_number(inputs.q0) << ','
         << format_number(inputs.q1) << ',' << format_number(inputs.nb1inf2) << ','
         << format_number(inputs.nd3b32) << ',' << format_number(f.value) << ',' << format_number(t_l) << ','
         << format_number(ml.t_star) << ',' << ks << ',' << km << '\n';
    return os.str();
  }
};

struct BoundOptions {
  std::size_t padding = 2;
  bool compute_bmo = true;
  BmoOptions bmo;
};

inline BoundReport bound_report(const SpectralVectorField& u0, const std::vector<double>& gammas,
                                const BoundConstants& c, const TimeGrid& tg, const BoundOptions& opt = {}) {
  c.validate();
  for (double g : gammas) check_gamma(g);
  BoundReport r;
  r.nq = nonlinear_quantities(u0, tg, opt.padding);
  r.inputs.q0 = r.nq.q0;
  r.inputs.q1 = r.nq.q1;
  r.inputs.nb1inf2 = besov_norm_heat(u0, 1.0, Lp::inf, Lp::two, tg, opt.padding).value;
  r.inputs.nd3b32 = besov_norm_heat(derivative(u0, Axis::x3, 1), 1.5, Lp::inf, Lp::inf, tg, opt.padding).value;
  for (double g : gammas) r.t_fp.push_back(t_fp(u0, g, c, tg, opt.padding));
  r.t_l = t_l_formula(r.inputs, c);
  if (r.inputs.q0 == 0.0) r.t_l_flag = "linear-flow regime";
  r.ml = m_l_and_t_star_formula(r.inputs, c);
  if (opt.compute_bmo) r.kt = kt_smallness(u0, c, tg, opt.bmo);
  r.metadata["vector_norm"] = "max over components";
  r.metadata["constants"] = "c_fp=" + format_number(c.c_fp) + " C=" + format_number(c.c_tl) +
                            " K=" + format_number(c.k_apriori) + " c0=" + format_number(c.c0);
  r.metadata["q0_residual"] = format_number(r.nq.q0_residual);
  r.metadata["q1_residual"] = format_number(r.nq.q1_residual);
  if (!r.t_l_flag.empty()) r.metadata["t_l_flag"] = r.t_l_flag;
  return r;
}

}  // namespace lsl
