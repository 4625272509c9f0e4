#include "catch_amalgamated.hpp"

#include <array>
#include <complex>
#include <random>

#include "lsl/lsl.hpp"

using namespace lsl;
using Catch::Approx;

namespace {

double rel_diff(const SpectralField& a, const SpectralField& b) {
  return std::sqrt(l2_norm_sq(a - b) / std::max(l2_norm_sq(b), 1e-300));
}
double rel_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  return std::sqrt(l2_norm_sq(a - b) / std::max(l2_norm_sq(b), 1e-300));
}

RealField random_real(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealField r(g);
  for (auto& v : r.values()) v = u(rng);
  return r;
}

// random trig polynomial with |index| <= band on every axis and no mean
SpectralField band_limited(const Grid& g, unsigned seed, long band) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  SpectralField a(g);
  for_each_mode(g, [&](const Mode& m) {
    if (std::labs(g.signed_index(m.i0)) > band || std::labs(g.signed_index(m.i1)) > band ||
        static_cast<long>(m.i2) > band)
      return;
    const double re = gauss(rng), im = gauss(rng);
    a[m.index] = cplx(re, im);
  });
  enforce_hermitian(a);
  a[0] = cplx{};
  return a;
}

}  // namespace

TEST_CASE("grid sizes are validated") {
  CHECK_THROWS_AS(Grid(12), UsageError);
  CHECK_THROWS_AS(Grid(4), UsageError);
  CHECK_THROWS_AS(Grid(16, -1.0), UsageError);
  const Grid g(16, 7.0 * pi / 4.0);
  CHECK(g.k_unit() == Approx(8.0 / 7.0));
  CHECK(g.nyquist() == Approx(8.0 * 8.0 / 7.0));
}

TEST_CASE("forward of a constant and of cos x1") {
  const Grid g(16);
  const SpectralField one = sample(g, [](double, double, double) { return 1.0; });
  CHECK(std::abs(one[0] - cplx(1.0, 0.0)) < 1e-14);
  CHECK(l2_norm_sq(one) == Approx(g.volume()));

  const SpectralField c = sample(g, [](double x1, double, double) { return std::cos(x1); });
  CHECK(std::abs(c[g.index(1, 0, 0)] - 0.5) < 1e-14);
  CHECK(std::abs(c[g.index(g.slot(-1), 0, 0)] - 0.5) < 1e-14);
  CHECK(c.max_abs() == Approx(0.5));
  CHECK(hermitian_defect(c) < 1e-14);
}

TEST_CASE("forward rejects mismatched arrays") {
  const Grid g(8);
  std::vector<double> v(100);
  CHECK_THROWS_AS(forward(v, g), UsageError);
}

TEST_CASE("round trip and Parseval over random fields") {
  const Grid g(16, 3.0);
  for (unsigned s = 0; s < 20; ++s) {
    const RealField r = random_real(g, s);
    const SpectralField a = forward(r);
    CHECK(hermitian_defect(a) < 1e-12);
    const RealField back = inverse(a);
    double err = 0.0, ref = 0.0, phys = 0.0;
    for (std::size_t i = 0; i < g.physical_size(); ++i) {
      err = std::max(err, std::abs(back[i] - r[i]));
      ref = std::max(ref, std::abs(r[i]));
      phys += r[i] * r[i];
    }
    CHECK(err <= 1e-12 * ref);
    phys *= g.volume() / static_cast<double>(g.physical_size());
    CHECK(std::abs(phys - l2_norm_sq(a)) <= 1e-10 * phys);
  }
}

TEST_CASE("derivatives of single modes") {
  const Grid g(16);
  const auto c1 = sample(g, [](double x1, double, double) { return std::cos(x1); });
  const auto s1 = sample(g, [](double x1, double, double) { return std::sin(x1); });
  CHECK(rel_diff(derivative(c1, Axis::x1, 1), -1.0 * s1) < 1e-13);
  const auto c3 = sample(g, [](double, double, double x3) { return std::cos(x3); });
  CHECK(rel_diff(derivative(c3, Axis::x3, 2), -1.0 * c3) < 1e-13);
  CHECK(derivative(c1, Axis::x2, 1).is_zero());
  CHECK_THROWS_AS(derivative(c1, Axis::x1, 3), UsageError);

  // non-2pi box: d/dx cos(k x) = -k sin(k x)
  const Grid h(16, 5.0);
  const double k = h.k_unit();
  const auto ck = sample(h, [&](double, double x2, double) { return std::cos(3 * k * x2); });
  const auto sk = sample(h, [&](double, double x2, double) { return std::sin(3 * k * x2); });
  CHECK(rel_diff(derivative(ck, Axis::x2, 1), -3.0 * k * sk) < 1e-13);
}

TEST_CASE("heat flow") {
  const Grid g(16);
  const auto c1 = sample(g, [](double x1, double, double) { return std::cos(x1); });
  CHECK(rel_diff(heat_flow(c1, 0.0), c1) == 0.0);
  CHECK(rel_diff(heat_flow(c1, 0.5), std::exp(-0.5) * c1) < 1e-14);
  CHECK(std::exp(-0.5) == Approx(0.60653).epsilon(1e-5));
  CHECK_THROWS_AS(heat_flow(c1, -1.0), UsageError);
  for (unsigned s = 0; s < 10; ++s) {
    const auto a = forward(random_real(g, 100 + s));
    CHECK(rel_diff(heat_flow(heat_flow(a, 0.013), 0.2), heat_flow(a, 0.213)) < 1e-12);
  }
}

TEST_CASE("Leray projector algebra") {
  const Grid g(16);
  // gradient of sin sin sin is annihilated
  const auto phi = sample(g, [](double x, double y, double z) { return std::sin(x) * std::sin(y) * std::sin(z); });
  SpectralVectorField grad(derivative(phi, Axis::x1, 1), derivative(phi, Axis::x2, 1), derivative(phi, Axis::x3, 1));
  CHECK(leray_project(grad).max_abs() < 1e-15);

  // (-d2 psi, d1 psi, 0) is unchanged
  const auto psi = forward(random_real(g, 7));
  SpectralVectorField rot(-1.0 * derivative(psi, Axis::x2, 1), derivative(psi, Axis::x1, 1), SpectralField(g));
  CHECK(rel_diff(leray_project(rot), rot) < 1e-13);

  // parallel to k: gone
  SpectralVectorField par(sample(g, [](double x1, double, double) { return std::cos(x1); }), SpectralField(g),
                          SpectralField(g));
  CHECK(leray_project(par).max_abs() < 1e-16);

  // mean passes through
  SpectralVectorField m(g);
  m[1][0] = 2.0;
  CHECK(leray_project(m)[1][0] == cplx(2.0));

  for (unsigned s = 0; s < 20; ++s) {
    SpectralVectorField v(forward(random_real(g, 3 * s)), forward(random_real(g, 3 * s + 1)),
                          forward(random_real(g, 3 * s + 2)));
    const auto p = leray_project(v);
    CHECK(p.divergence_free());
    CHECK(rel_diff(leray_project(p), p) < 1e-10);
    CHECK(divergence_residual(p) < 1e-10);
    const auto q = forward(random_real(g, 1000 + s));
    SpectralVectorField gq(derivative(q, Axis::x1, 1), derivative(q, Axis::x2, 1), derivative(q, Axis::x3, 1));
    CHECK(std::sqrt(l2_norm_sq(leray_project(gq)) / l2_norm_sq(gq)) < 1e-10);
  }
}

TEST_CASE("advect on hand-computed flows") {
  const Grid g(16);
  // shear: zero
  CHECK(advect(shear_flow(g)).max_abs() < 1e-15);
  CHECK(advect(SpectralVectorField(g)).is_zero());
  // cellular flow (cos x2, cos x1, 0)
  SpectralVectorField u(sample(g, [](double, double y, double) { return std::cos(y); }),
                        sample(g, [](double x, double, double) { return std::cos(x); }), SpectralField(g));
  SpectralVectorField expect(sample(g, [](double x, double y, double) { return -std::cos(x) * std::sin(y); }),
                             sample(g, [](double x, double y, double) { return -std::cos(y) * std::sin(x); }),
                             SpectralField(g));
  CHECK(rel_diff(advect(u), expect) < 1e-14);
}

TEST_CASE("advect matches a brute-force mode sum") {
  // u and grad u summed mode by mode at every grid point (no FFT), then the
  // pointwise product is transformed once. Bandwidth 2 on n = 16 keeps the
  // product inside the 2/3 band.
  const Grid g(16);
  const long band = 2;
  SpectralVectorField u(band_limited(g, 1, band), band_limited(g, 2, band), band_limited(g, 3, band));
  const std::size_t n = g.n();
  std::vector<std::array<double, 3>> val(g.physical_size()), dx[3];
  for (auto& d : dx) d.assign(g.physical_size(), {0, 0, 0});
  for (auto& v : val) v = {0, 0, 0};
  for (int c = 0; c < 3; ++c)
    for_each_mode(g, [&](const Mode& m) {
      const cplx a = u[c][m.index];
      if (a == cplx{}) return;
      for (std::size_t j0 = 0; j0 < n; ++j0)
        for (std::size_t j1 = 0; j1 < n; ++j1)
          for (std::size_t j2 = 0; j2 < n; ++j2) {
            const double h = g.spacing();
            const double ph = m.k[0] * j0 * h + m.k[1] * j1 * h + m.k[2] * j2 * h;
            const cplx e = m.weight * a * cplx(std::cos(ph), std::sin(ph));
            const std::size_t p = g.point(j0, j1, j2);
            val[p][c] += e.real();
            for (int d = 0; d < 3; ++d) dx[d][p][c] += (cplx(0, m.k[d]) * e).real();
          }
    });
  // half spectrum: weight * Re(.) restores the conjugate partners
  SpectralVectorField brute(g);
  for (int c = 0; c < 3; ++c) {
    RealField r(g);
    for (std::size_t p = 0; p < g.physical_size(); ++p)
      r[p] = val[p][0] * dx[0][p][c] + val[p][1] * dx[1][p][c] + val[p][2] * dx[2][p][c];
    brute[c] = forward(r);
  }
  const auto fast = advect(u);
  CHECK(std::sqrt(l2_norm_sq(fast - brute) / l2_norm_sq(brute)) < 1e-10);
  const SpectralVectorField fine(pad(brute[0], 2), pad(brute[1], 2), pad(brute[2], 2));
  CHECK(std::sqrt(l2_norm_sq(advect_padded(u, 2) - fine) / l2_norm_sq(fine)) < 1e-10);
}

TEST_CASE("Lebesgue norms") {
  const Grid g(16);
  const auto c1 = sample(g, [](double x1, double, double) { return std::cos(x1); });
  CHECK(lebesgue_norm(c1, Lp::inf) == Approx(1.0).margin(1e-3));
  CHECK(lebesgue_norm(c1, Lp::two) == Approx(std::sqrt(std::pow(2 * pi, 3) / 2)).epsilon(1e-12));
  CHECK(lebesgue_norm(c1, Lp::two) == Approx(11.1366).epsilon(1e-5));
  const auto one = sample(g, [](double, double, double) { return 1.0; });
  CHECK(lebesgue_norm(one, Lp::four) == Approx(std::pow(2 * pi, 0.75)).epsilon(1e-12));
  CHECK(lebesgue_norm(c1, Lp::four) == Approx(std::pow(3.0 / 8.0 * std::pow(2 * pi, 3), 0.25)).epsilon(1e-12));
  CHECK(lebesgue_norm(SpectralField(g), Lp::inf) == 0.0);
  CHECK_THROWS_AS(parse_exponent("3"), UsageError);
}

TEST_CASE("mixed norms") {
  const Grid g(16);
  const auto c3 = sample(g, [](double, double, double x3) { return std::cos(x3); });
  const auto c1 = sample(g, [](double x1, double, double) { return std::cos(x1); });
  CHECK(mixed_norm(c3, {Lp::inf, Lp::two}) == Approx(2 * pi).epsilon(1e-10));
  CHECK(mixed_norm(c1, {Lp::inf, Lp::two}) == Approx(std::sqrt(4 * pi * pi / 2)).epsilon(1e-10));
  CHECK(mixed_norm(SpectralField(g), {Lp::two, Lp::four}) == 0.0);
  // separable: ||cos x3||_{L2} * ||cos x1||_{L4(plane)}
  const auto p = sample(g, [](double x1, double, double x3) { return std::cos(x1) * std::cos(x3); });
  CHECK(mixed_norm(p, {Lp::two, Lp::four}) ==
        Approx(std::sqrt(pi) * std::pow(3.0 / 8.0 * 4 * pi * pi, 0.25)).epsilon(1e-10));
  CHECK_THROWS_AS(mixed_norm(c1, {Lp::two, Lp::two}), UsageError);
  CHECK_THROWS_AS(mixed_norm(c1, {Lp::four, Lp::inf}), UsageError);
}

TEST_CASE("anisotropic inequalities over random fields") {
  // vertical: fields without kz = 0 content (zero vertical mean), the setting
  // in which the sup in x3 is controlled; horizontal: no kx = ky = 0 content
  const Grid g(16);
  double worst_v = 0.0, worst_h = 0.0;
  for (unsigned s = 0; s < 120; ++s) {
    SpectralField a = band_limited(g, 500 + s, 1 + s % 5);
    SpectralField b = a;
    for_each_mode(g, [&](const Mode& m) {
      if (m.i2 == 0) a[m.index] = cplx{};
      if (m.i0 == 0 && m.i1 == 0) b[m.index] = cplx{};
    });
    const double l2a = std::sqrt(l2_norm_sq(a)), d3 = std::sqrt(l2_norm_sq(derivative(a, Axis::x3, 1)));
    worst_v = std::max(worst_v, mixed_norm(a, {Lp::inf, Lp::two}) / std::sqrt(d3 * l2a));
    const double l2b = std::sqrt(l2_norm_sq(b));
    const double gh = std::sqrt(l2_norm_sq(derivative(b, Axis::x1, 1)) + l2_norm_sq(derivative(b, Axis::x2, 1)));
    worst_h = std::max(worst_h, mixed_norm(b, {Lp::two, Lp::four}) / std::sqrt(gh * l2b));
  }
  INFO("max ratio Linf_v L2_h: " << worst_v << ", L2_v L4_h: " << worst_h);
  CHECK(worst_v <= 4.0);
  CHECK(worst_h <= 4.0);
  CHECK(worst_v > 0.0);
}

TEST_CASE("padding splits the Nyquist coefficient") {
  const Grid g(8);
  const auto ny = sample(g, [](double x1, double, double) { return std::cos(4 * x1); });
  const auto p = pad(ny, 2);
  // on the coarse grid the samples are (-1)^j; padded, the field is cos 4x1
  CHECK(l2_norm_sq(p) == Approx(0.5 * l2_norm_sq(ny)).epsilon(1e-12));
  CHECK(hermitian_defect(p) < 1e-14);
  // the padded field still takes the grid values
  const RealField fine = inverse(p), coarse = inverse(ny);
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(fine[p.grid().point(2 * j, 0, 0)] == Approx(coarse[g.point(j, 0, 0)]).margin(1e-13));
}

TEST_CASE("LSL1 snapshots round-trip bit-exactly") {
  const Grid g(8, 1.7);
  const auto u = make_divfree_random(g, 42, 0, 2);
  const std::string path = "snapshot_test.lsl";
  write_snapshot(path, u);
  const auto s = read_snapshot(path);
  CHECK(s.grid == g);
  REQUIRE(s.components.size() == 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.spectral_size(); ++i) CHECK(s.components[c][i] == u[c][i]);
  // header layout
  std::ifstream f(path, std::ios::binary);
  char magic[4];
  f.read(magic, 4);
  CHECK(std::string(magic, 4) == "LSL1");
  std::uintmax_t size = std::filesystem::file_size(path);
  CHECK(size == 4 + 3 * 8 + 8 + 8 + 3 * 8 * 8 * 8 * 16);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_snapshot("no_such_file.lsl"), UsageError);
}
