#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lsl/config.hpp"
#include "lsl/egamma.hpp"
#include "lsl/snapshot.hpp"
#include "lsl/sweep.hpp"

namespace lsl {

enum ExitCode { exit_ok = 0, exit_usage = 2, exit_numerical = 3 };

namespace detail {

inline std::filesystem::path out_path(const ExperimentConfig& c, const std::string& name) {
  std::filesystem::path dir(c.out_dir.empty() ? "." : c.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string());
  return dir / name;
}

inline void write_text(const ExperimentConfig& c, const std::string& name, const std::string& text) {
  const auto p = out_path(c, name);
  std::ofstream os(p, std::ios::binary);
  if (!os) throw UsageError("cannot write " + p.string());
  os << text;
}

// gnuplot twin of a CSV: header commented, commas to spaces, empty cells "?"
inline std::string dat_twin(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string row;
    std::string cell;
    auto flush = [&] {
      if (!row.empty()) row += ' ';
      row += cell.empty() ? "?" : cell;
      cell.clear();
    };
    for (char ch : line) {
      if (ch == ',') flush();
      else cell += ch;
    }
    flush();
    out << (first ? "# " : "") << row << '\n';
    first = false;
  }
  return out.str();
}

inline void write_csv_pair(const ExperimentConfig& c, const std::string& stem, const std::string& csv) {
  write_text(c, stem + ".csv", csv);
  write_text(c, stem + ".dat", dat_twin(csv));
}

}  // namespace detail

// Field named by the config: an LSL1 file if given, else a generator.
//  fixture | shear | cellular | mode | zero | random | oscillatory
inline SpectralVectorField load_input(const ExperimentConfig& c) {
  if (!c.field.empty()) {
    SpectralVectorField u = read_vector_snapshot(c.field);
    u.mark_divergence_free(divergence_residual(u) <= 1e-8);
    return u;
  }
  const Grid g = c.grid();
  const std::string& gen = c.generator;
  if (gen == "fixture") return fixture_flow(g, c.amplitude);
  if (gen == "shear") return shear_flow(g, c.amplitude);
  if (gen == "zero") {
    SpectralVectorField u(g);
    u.mark_divergence_free(true);
    return u;
  }
  if (gen == "cellular" || gen == "mode") {
    const double k = g.k_unit(), a = c.amplitude;
    SpectralVectorField u(g);
    if (gen == "cellular") {
      u[0] = sample(g, [&](double, double x2, double) { return a * std::cos(k * x2); });
      u[1] = sample(g, [&](double x1, double, double) { return a * std::cos(k * x1); });
    } else {
      u[2] = sample(g, [&](double x1, double, double) { return a * std::cos(k * x1); });
    }
    u.mark_divergence_free(true);
    return u;
  }
  if (gen == "random") return c.amplitude * make_divfree_random(g, c.seed, c.band_lo, c.band_hi);
  if (gen == "oscillatory") {
    if (c.eps.empty()) throw UsageError("oscillatory generator needs an eps value");
    return make_oscillatory_data(c.family_point(c.eps.front()), c.bump(), g, parse_construction(c.construction)).u0;
  }
  throw UsageError("unknown generator '" + gen + "'");
}

// Norm tokens (vector fields take the max over components unless noted):
//   besov:SIGMA:P:Q[:dyadic]   heat-flow (default) or Littlewood-Paley form
//   sobolev:S                  Fourier and dyadic forms, Euclidean over components
//   lebesgue:P
//   mixed:PV:PH                L^PV_v L^PH_h
//   bmo                        BMO^-1, heat and Carleson terms
//   egamma:GAMMA               E^gamma of the free heat evolution on [0, t_max]
inline NormReport compute_norms(const SpectralVectorField& u, const std::vector<std::string>& tokens,
                                const TimeGrid& tg, std::size_t padding) {
  NormReport rep;
  const LPFilterBank bank(u.grid());
  for (const auto& tok : tokens) {
    std::vector<std::string> f;
    {
      std::string cur;
      for (char ch : tok + ":") {
        if (ch == ':') {
          f.push_back(cur);
          cur.clear();
        } else {
          cur += ch;
        }
      }
    }
    const std::string& kind = f[0];
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (f.size() < lo || f.size() > hi) throw UsageError("malformed norm token '" + tok + "'");
    };
    if (kind == "besov") {
      arity(4, 5);
      const double s = parse_number(f[1]);
      const Lp p = parse_exponent(f[2]), q = parse_exponent(f[3]);
      const bool dyadic = f.size() == 5;
      if (dyadic && f[4] != "dyadic" && f[4] != "heat") throw UsageError("unknown besov variant '" + f[4] + "'");
      const NormValue v = (dyadic && f[4] == "dyadic") ? besov_norm_dyadic(u, s, p, q, bank, padding)
                                                       : besov_norm_heat(u, s, p, q, tg, padding);
      rep.add({"besov", s, to_string(p), to_string(q), (dyadic && f[4] == "dyadic") ? "dyadic" : "heatflow",
               v.value, v.residual});
    } else if (kind == "sobolev") {
      arity(2, 2);
      const double s = parse_number(f[1]);
      const SobolevValue v = sobolev_norm(u, s, bank);
      rep.add({"sobolev", s, "2", "2", "fourier", v.fourier, 0.0});
      rep.add({"sobolev", s, "2", "2", "dyadic", v.dyadic, 0.0});
    } else if (kind == "lebesgue") {
      arity(2, 2);
      const Lp p = parse_exponent(f[1]);
      rep.add({"lebesgue", 0.0, to_string(p), "", p == Lp::two ? "parseval" : "padded", lebesgue_norm(u, p, padding),
               0.0});
    } else if (kind == "mixed") {
      arity(3, 3);
      const MixedNormSpec spec{parse_exponent(f[1]), parse_exponent(f[2])};
      spec.validate();
      double m = 0.0;
      for (int c = 0; c < 3; ++c) m = std::max(m, mixed_norm(u[c], spec, padding));
      rep.add({"mixed", 0.0, to_string(spec.vertical), to_string(spec.horizontal), "vertical-outer", m, 0.0});
    } else if (kind == "bmo") {
      arity(1, 1);
      BmoOptions bo;
      bo.padding = padding;
      const BmoValue b = bmo_inv_norm(u, tg, bo);
      rep.add({"bmo", 1.0, "", "", "heat", b.heat_term, 0.0});
      rep.add({"bmo", 1.0, "", "", "carleson", b.carleson_term, 0.0});
      rep.add({"bmo", 1.0, "", "", "total", b.total, 0.0});
    } else if (kind == "egamma") {
      arity(2, 2);
      const double gm = parse_number(f[1]);
      check_gamma(gm);
      std::vector<double> times{0.0};
      for (double t : tg.samples()) times.push_back(t);
      double m = 0.0;
      for (int c = 0; c < 3; ++c)
        if (!u[c].is_zero()) m = std::max(m, egamma_norm(heat_samples(u[c], times), gm, tg.t_max, bank, padding));
      rep.add({"egamma", gm, "inf", "", "heat", m, 0.0});
    } else {
      throw UsageError("unknown norm token '" + tok + "'");
    }
  }
  return rep;
}

inline int cmd_norms(const ExperimentConfig& c, std::ostream& log) {
  c.validate();
  const SpectralVectorField u = load_input(c);
  const TimeGrid tg = TimeGrid::for_grid(u.grid(), c.time_count);
  NormReport rep = compute_norms(u, c.norms, tg, c.padding);
  rep.metadata["grid"] = std::to_string(u.grid().n()) + " box=" + format_number(u.grid().box_len());
  rep.metadata["input"] = c.field.empty() ? "generator " + c.generator : c.field;
  rep.metadata["vector_norm"] = "max over components (sobolev: euclidean)";
  detail::write_text(c, "norms.csv", rep.to_csv());
  detail::write_text(c, "norms_meta.txt", rep.metadata_text());
  log << rep.to_csv();
  return exit_ok;
}

inline int cmd_bounds(const ExperimentConfig& c, std::ostream& log) {
  c.validate();
  const SpectralVectorField u = load_input(c);
  const TimeGrid tg = TimeGrid::for_grid(u.grid(), c.time_count);
  BoundOptions bo;
  bo.padding = c.padding;
  bo.compute_bmo = c.bmo;
  BoundReport r = bound_report(u, c.gamma, c.constants, tg, bo);
  if (c.field.empty() && c.generator == "oscillatory") {
    r.eps = c.eps.front();
    r.alpha = c.alpha;
  }
  const std::string csv = BoundReport::csv_header() + r.csv_rows();
  detail::write_text(c, "bounds.csv", csv);
  std::ostringstream meta;
  for (const auto& [k, v] : r.metadata) meta << k << " = " << v << '\n';
  detail::write_text(c, "bounds_meta.txt", meta.str());
  log << csv;
  if (!r.t_l_flag.empty()) log << "t_l = inf (" << r.t_l_flag << ")\n";
  return exit_ok;
}

inline std::string sweep_table_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "eps,alpha,A,norm_f_bsig,norm_u0_b1m2g,norm_d3u0_b32,q0,q1,t_fp,t_l\n";
  for (const auto& r : rows) {
    if (r.skipped) continue;
    os << format_number(r.eps) << ',' << format_number(r.alpha) << ',' << format_number(r.A) << ','
       << format_number(r.norm_f_bsig.front()) << ',' << format_number(r.norm_u0_b1m2g.front()) << ','
       << format_number(r.norm_d3u0_b32) << ',' << format_number(r.q0) << ',' << format_number(r.q1) << ','
       << format_number(r.t_fp.front()) << ',' << format_number(r.t_l) << '\n';
  }
  return os.str();
}

inline SweepOptions sweep_options(const ExperimentConfig& c) {
  SweepOptions o;
  o.sigmas = c.sigma;
  o.gammas = c.gamma;
  o.constants = c.constants;
  o.padding = c.padding;
  o.time_count = c.time_count;
  o.construction = parse_construction(c.construction);
  o.threads = c.threads;
  return o;
}

inline int cmd_sweep(const ExperimentConfig& c, std::ostream& log) {
  c.validate();
  if (c.eps.size() < 4) throw UsageError("sweep needs at least 4 eps values");
  if (c.sigma.empty() || c.gamma.empty()) throw UsageError("sweep needs sigma and gamma values");
  std::vector<double> eps = c.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<OscillatoryParams> ps;
  for (double e : eps) ps.push_back(c.family_point(e));
  const SweepOptions opt = sweep_options(c);
  const auto rows = family_sweep_values(ps, c.bump(), c.grid(), opt);

  for (const auto& r : rows)
    if (r.skipped) log << "warning: eps=" << format_number(r.eps) << " skipped: " << r.note << '\n';

  detail::write_csv_pair(c, "sweep", sweep_table_csv(rows));
  std::ostringstream sig, gam, aux;
  sig << "eps,sigma,norm_f_bsig\n";
  gam << "eps,gamma,norm_u0_b1m2g,t_fp\n";
  aux << "eps,nb1inf2,div_residual,dc_removed,skipped,note\n";
  for (const auto& r : rows) {
    aux << format_number(r.eps) << ',' << format_number(r.nb1inf2) << ',' << format_number(r.div_residual) << ','
        << format_number(r.dc_removed) << ',' << (r.skipped ? "true" : "false") << ',' << r.note << '\n';
    if (r.skipped) continue;
    for (std::size_t i = 0; i < opt.sigmas.size(); ++i)
      sig << format_number(r.eps) << ',' << format_number(opt.sigmas[i]) << ',' << format_number(r.norm_f_bsig[i])
          << '\n';
    for (std::size_t i = 0; i < opt.gammas.size(); ++i)
      gam << format_number(r.eps) << ',' << format_number(opt.gammas[i]) << ',' << format_number(r.norm_u0_b1m2g[i])
          << ',' << format_number(r.t_fp[i]) << '\n';
  }
  detail::write_csv_pair(c, "sweep_sigma", sig.str());
  detail::write_csv_pair(c, "sweep_gamma", gam.str());
  detail::write_text(c, "sweep_aux.csv", aux.str());

  const auto fits = sweep_fits(rows, opt, c.eta);
  std::ostringstream fo;
  fo << "quantity,parameter,slope,intercept,r2,expected\n";
  for (const auto& f : fits)
    fo << f.quantity << ',' << format_number(f.parameter) << ',' << format_number(f.fit.slope) << ','
       << format_number(f.fit.intercept) << ',' << format_number(f.fit.r2) << ',' << format_number(f.expected) << '\n';
  detail::write_csv_pair(c, "fits", fo.str());
  log << fo.str();
  log << "t_l/t_fp increasing as eps decreases: " << (ratio_increasing(rows) ? "yes" : "no") << '\n';
  return exit_ok;
}

inline int cmd_solve(const ExperimentConfig& c, std::ostream& log) {
  c.validate();
  const SpectralVectorField u0 = load_input(c);
  const Trajectory tr = integrate(u0, c.solver);
  detail::write_csv_pair(c, "ledger", tr.ledger.to_csv());
  write_snapshot(detail::out_path(c, "final.lsl").string(), tr.samples.back().second);

  const TimeGrid tg = TimeGrid::for_grid(u0.grid(), c.time_count);
  std::ostringstream s;
  s << "key,value\n";
  s << "t_final," << format_number(tr.ledger.rows.back().t) << '\n';
  s << "lost_resolution," << (tr.lost_resolution ? "true" : "false") << '\n';
  if (tr.lost_resolution) {
    s << "loss_time," << format_number(tr.loss_time) << '\n';
    s << "loss_reason," << tr.loss_reason << '\n';
  }
  s << "energy_identity_drift," << format_number(energy_identity_check(tr)) << '\n';
  s << "leray_inequality," << (leray_inequality_holds(tr) ? "true" : "false") << '\n';
  if (!u0.is_zero()) {
    const auto lin = LinearFlowInputs::compute(u0, tg, c.padding);
    const auto fl = fluctuation_check(tr, lin);
    const auto d3 = d3_energy_check(tr, lin);
    s << "fluctuation_ratio," << format_number(fl.ratio) << '\n';
    s << "d3_energy_ratio," << format_number(d3.ratio) << '\n';
  }
  detail::write_text(c, "solve_summary.csv", s.str());
  log << s.str();
  // the numerical life span is a resolution proxy; report it as a failure code
  return tr.lost_resolution ? exit_numerical : exit_ok;
}

// Fast invariant suite on the configured grid (keep it small: 16 or 32).
inline int cmd_check(const ExperimentConfig& c, std::ostream& log) {
  c.validate();
  const Grid g = c.grid();
  const TimeGrid tg = c.time_grid();
  struct Item {
    std::string name;
    double value;
    double limit;
  };
  std::vector<Item> items;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };

  const SpectralVectorField u = make_divfree_random(g, c.seed, 0, 1);
  {
    const RealField r = inverse(u[0]);
    double phys = 0.0;
    for (double v : r.values()) phys += v * v;
    phys *= g.volume() / static_cast<double>(g.physical_size());
    items.push_back({"parseval", rel(phys, l2_norm_sq(u[0])), 1e-10});
  }
  {
    const auto w = make_random_scalar(g, c.seed + 1, 0, 1);
    SpectralVectorField v(derivative(w, Axis::x1, 1), derivative(w, Axis::x2, 1), SpectralField(g));
    v += u;
    const auto p1 = leray_project(v), p2 = leray_project(p1);
    items.push_back({"leray_idempotent", std::sqrt(l2_norm_sq(p1 - p2) / l2_norm_sq(p1)), 1e-10});
    items.push_back({"leray_divergence", divergence_residual(p1), 1e-10});
  }
  {
    const auto a = heat_flow(heat_flow(u, 0.1), 0.2), b = heat_flow(u, 0.3);
    items.push_back({"heat_semigroup", std::sqrt(l2_norm_sq(a - b) / l2_norm_sq(b)), 1e-10});
  }
  {
    const double k = g.k_unit();
    const SpectralField m = sample(g, [&](double x1, double, double) { return std::cos(k * x1); });
    // scale-invariant form: ||cos(k x)|| in B^{-1}_{inf,inf} = e^{-1/2}/sqrt(2) / k
    items.push_back({"besov_single_mode",
                     rel(besov_norm_heat(m, 1.0, Lp::inf, Lp::inf, tg, c.padding).value * k,
                         std::exp(-0.5) / std::sqrt(2.0)),
                     1e-2});
  }
  {
    const auto ud = shear_flow(g);
    SolverConfig sc;
    sc.dt = 1e-2;
    sc.t_end = 0.2;
    const Trajectory tr = integrate(ud, sc);
    const auto exact = heat_flow(ud, sc.t_end);
    items.push_back({"shear_exact", std::sqrt(l2_norm_sq(tr.samples.back().second - exact) / l2_norm_sq(exact)), 1e-8});
    const auto fx = fixture_flow(g);
    const Trajectory tf = integrate(fx, sc);
    items.push_back({"energy_identity", energy_identity_check(tf), 1e-6});
    items.push_back({"leray_inequality", leray_inequality_holds(tf) ? 0.0 : 1.0, 0.5});
  }
  {
    const BoundConstants bc = c.constants;
    const LifespanInputs in{1.3, 0.7, 0.4, 0.2};
    const double lhs = t_l_formula(in, bc) / m_l_and_t_star_formula(in, bc).t_star;
    items.push_back({"t_l_over_t_star", rel(lhs, t_l_over_t_star(bc)), 1e-12});
  }
  {
    const auto p = detail::out_path(c, "check_roundtrip.lsl").string();
    write_snapshot(p, u);
    const auto back = read_vector_snapshot(p);
    double d = 0.0;
    for (int k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < g.spectral_size(); ++i) d = std::max(d, std::abs(back[k][i] - u[k][i]));
    std::filesystem::remove(p);
    items.push_back({"lsl1_roundtrip", d, 0.0});
  }

  std::ostringstream os;
  os << "check,value,limit,status\n";
  bool ok = true;
  for (const auto& it : items) {
    const bool pass = it.value <= it.limit && std::isfinite(it.value);
    ok = ok && pass;
    os << it.name << ',' << format_number(it.value) << ',' << format_number(it.limit) << ','
       << (pass ? "PASS" : "FAIL") << '\n';
  }
  detail::write_text(c, "check.csv", os.str());
  log << os.str();
  return ok ? exit_ok : exit_numerical;
}

}  // namespace lsl
