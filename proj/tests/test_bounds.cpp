#include "catch_amalgamated.hpp"

#include <cmath>

#include "lsl/lsl.hpp"

using namespace lsl;
using Catch::Approx;

namespace {

SpectralVectorField cellular(const Grid& g, double a = 1.0) {
  SpectralVectorField u(sample(g, [&](double, double y, double) { return a * std::cos(y); }),
                        sample(g, [&](double x, double, double) { return a * std::cos(x); }), SpectralField(g));
  u.mark_divergence_free(true);
  return u;
}

const double V = std::pow(2 * pi, 3);

}  // namespace

TEST_CASE("Q0 and Q1 of the fixture flow") {
  // ||P(uL.grad uL)||^2 = V/12 e^{-6t}, and every mode has |k3| = 1
  const Grid g(16);
  const TimeGrid tg = TimeGrid::for_grid(g);
  const auto nq = nonlinear_quantities(fixture_flow(g), tg);
  CHECK(nq.q0 == Approx(V / 12 * std::tgamma(1.5) / std::pow(6.0, 1.5)).epsilon(1e-4));
  CHECK(nq.q1 == Approx(V / 12 * std::tgamma(2.5) / std::pow(6.0, 2.5)).epsilon(1e-4));
  CHECK(nq.q0_residual < 1e-6 * nq.q0);
  for (std::size_t i = 0; i < nq.t.size(); i += 7) {
    const double t = nq.t[i];
    if (nq.i0[i] == 0.0) continue;
    CHECK(nq.i0[i] == Approx(std::sqrt(t) * V / 12 * std::exp(-6 * t)).epsilon(1e-10));
    CHECK(nq.i1[i] == Approx(t * std::sqrt(t) * V / 12 * std::exp(-6 * t)).epsilon(1e-10));
  }
}

TEST_CASE("Q integrand against a pointwise product") {
  // product formed from closed-form u_L and its derivatives at the grid points
  const Grid g(16);
  const TimeGrid tg = TimeGrid::for_grid(g);
  const auto nq = nonlinear_quantities(fixture_flow(g), tg);
  for (std::size_t i : {std::size_t{10}, std::size_t{40}, std::size_t{60}}) {
    const double t = nq.t[i];
    const double e1 = std::exp(-t), e2 = std::exp(-2 * t);
    SpectralVectorField prod(
        sample(g, [&](double x1, double x2, double x3) { return e1 * std::cos(x1) * (-e2 * std::sin(x2) * std::cos(x3)); }),
        sample(g, [&](double x1, double x2, double x3) { return e2 * std::cos(x2) * std::cos(x3) * (-e1 * std::sin(x1)); }),
        SpectralField(g));
    const auto p = leray_project(prod);
    CHECK(nq.i0[i] == Approx(std::sqrt(t) * l2_norm_sq(p)).epsilon(1e-10));
    CHECK(nq.i1[i] == Approx(t * std::sqrt(t) * l2_norm_sq(derivative(p, Axis::x3, 2))).epsilon(1e-10));
  }
}

TEST_CASE("degenerate data: gradients of the nonlinearity and shears") {
  const Grid g(16);
  const TimeGrid tg = TimeGrid::for_grid(g);
  // u.grad u is a gradient for the cellular flow, so P kills it
  CHECK(nonlinear_quantities(cellular(g), tg).q0 < 1e-20);
  const BoundConstants c;
  const auto r = bound_report(shear_flow(g), {0.25}, c, tg, {2, false, {}});
  CHECK(r.inputs.q0 == 0.0);
  CHECK(std::isinf(r.t_l));
  CHECK(r.t_l_flag == "linear-flow regime");
  CHECK(std::isinf(r.ml.t_star));
  CHECK(std::isfinite(r.t_fp.front().value));

  const auto z = bound_report(SpectralVectorField(g), {0.1, 0.4}, c, tg);
  CHECK(z.inputs.q0 == 0.0);
  CHECK(z.inputs.nb1inf2 == 0.0);
  CHECK(z.inputs.nd3b32 == 0.0);
  CHECK(std::isinf(z.t_fp[0].value));
  CHECK(z.t_fp[1].infinite);
  CHECK(z.kt->small);
  CHECK(z.kt->bmo.total == 0.0);
}

TEST_CASE("T_L and T_* differ by the constant factor") {
  BoundConstants c;
  c.c_tl = 0.7;
  c.k_apriori = 1.3;
  for (const LifespanInputs& in : {LifespanInputs{1.0, 2.0, 0.3, 0.5}, LifespanInputs{1e-3, 5.0, 2.0, 0.01},
                                   LifespanInputs{40.0, 1e-4, 0.9, 3.0}}) {
    const double ratio = t_l_formula(in, c) / m_l_and_t_star_formula(in, c).t_star;
    CHECK(std::abs(ratio / t_l_over_t_star(c) - 1.0) < 1e-12);
  }
}

TEST_CASE("T_L decreases under amplitude scaling") {
  const Grid g(16);
  const TimeGrid tg = TimeGrid::for_grid(g);
  const BoundConstants c;
  const auto u = fixture_flow(g);
  const auto a = bound_report(u, {0.25}, c, tg, {2, false, {}});
  const auto b = bound_report(2.0 * u, {0.25}, c, tg, {2, false, {}});
  CHECK(b.inputs.q0 == Approx(16 * a.inputs.q0).epsilon(1e-10));
  CHECK(b.inputs.q1 == Approx(16 * a.inputs.q1).epsilon(1e-10));
  CHECK(b.t_l < a.t_l);
  CHECK(b.t_fp.front().value < a.t_fp.front().value);
}

TEST_CASE("t_fp scales like lambda^-2") {
  const Grid g(32);
  const TimeGrid tg = TimeGrid::for_grid(g);
  const BoundConstants c;
  const auto u = make_divfree_random(g, 5, 0, 1);
  const auto v = rescale(u, 2);
  // the 1/gamma power amplifies sup-norm error, so sample on a 4x grid;
  // one heat profile per component serves every gamma
  const auto pu = detail::component_profiles(u, tg, 4), pv = detail::component_profiles(v, tg, 4);
  for (double gm : {0.1, 0.25, 0.4}) {
    const double nu = detail::max_norm(pu, 1 - 2 * gm, Lp::inf), nv = detail::max_norm(pv, 1 - 2 * gm, Lp::inf);
    CHECK(t_fp_from_norm(nv, gm, c) / t_fp_from_norm(nu, gm, c) == Approx(0.25).epsilon(0.01));
    CHECK(t_fp(u, gm, c, tg).norm == Approx(nu).epsilon(1e-3));
  }
  CHECK_THROWS_AS(t_fp(u, 0.5, c, tg), UsageError);
  CHECK_THROWS_AS(t_fp(u, 0.0, c, tg), UsageError);
  CHECK(t_fp_from_norm(0.0, 0.25, c) == infinity);
  BoundConstants d;
  d.c_fp_by_gamma[0.25] = 3.0;
  CHECK(t_fp_from_norm(2.0, 0.25, d) == Approx(3.0 / 16.0));
  CHECK(t_fp_from_norm(2.0, 0.1, d) == Approx(std::pow(2.0, -10.0)));
}

TEST_CASE("preconditions") {
  const Grid g(16);
  const TimeGrid tg = TimeGrid::for_grid(g);
  SpectralVectorField bad(sample(g, [](double x, double, double) { return std::cos(x); }), SpectralField(g),
                          SpectralField(g));
  CHECK_THROWS_AS(nonlinear_quantities(bad, tg), UsageError);
  SpectralVectorField mean(g);
  mean[0][0] = 1.0;
  CHECK_THROWS_AS(nonlinear_quantities(mean, tg), UsageError);
  BoundConstants c;
  c.c_tl = -1.0;
  CHECK_THROWS_AS(bound_report(fixture_flow(g), {0.25}, c, tg), UsageError);
}

TEST_CASE("fixture bound row is frozen") {
  const Grid g(16);
  const TimeGrid tg = TimeGrid::for_grid(g);
  const auto r = bound_report(fixture_flow(g), {0.25}, BoundConstants{}, tg);
  CHECK(r.inputs.q0 == Approx(V / 12 * std::tgamma(1.5) / std::pow(6.0, 1.5)).epsilon(1e-4));
  CHECK(r.inputs.q1 == Approx(V / 12 * std::tgamma(2.5) / std::pow(6.0, 2.5)).epsilon(1e-4));
  CHECK(r.inputs.nb1inf2 == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(r.inputs.nd3b32 == Approx(std::pow(3.0 / 8.0, 0.75) * std::exp(-0.75)).epsilon(1e-3));
  CHECK(r.t_fp.front().norm == Approx(std::pow(0.25, 0.25) * std::exp(-0.25)).epsilon(1e-2));
  REQUIRE(r.kt);
  CHECK_FALSE(r.kt->small);
  CHECK(r.t_l == Approx(0.184542334409).epsilon(1e-4));
  CHECK(r.kt->margin == Approx(1.86721594794).epsilon(1e-6));
  const std::string rows = r.csv_rows();
  CHECK(rows.rfind(",,0.25,", 0) == 0);
  CHECK(BoundReport::csv_header() == "eps,alpha,gamma,q0,q1,nb1inf2,nd3b32,t_fp,t_l,t_star,kt_small,kt_margin\n");
}
