#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "optosat/acceptance.hpp"
#include "optosat/dynamics.hpp"

using namespace optosat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EffectiveParams fig2_point(double gs, double fs) {
  return resolve_effective(reference_device(), [&] {
    OperatingPoint op = reference_operating_point();
    op.sat_gain = gs;
    op.sat_loss = fs;
    return op;
  }());
}

EffectiveParams random_effective(acceptance::Uniform& u) {
  return {u(-2, 2), u(-2, 2), u(0, 1), u(0, 1), 0.0, 0.0, u(-1, 1), u(0, 1)};
}

SystemParams random_system(acceptance::Uniform& u) {
  SystemParams p;
  p.omega_m = u(0.5, 2.0);
  p.gamma_m = u(0.0, 0.1);
  p.hopping = u(0.0, 1.0);
  return p;
}

// Independent linearization in the complex amplitudes
//   z = (a1, a1^dag, a2, a2^dag, b, b^dag),  dz/dt = A z
// converted to quadratures with X = (o + o^dag)/sqrt2, Y = i(o^dag - o)/sqrt2.
Matrix complex_mode_drift(const EffectiveParams& e, const SystemParams& p) {
  using C = std::complex<double>;
  using namespace std::complex_literals;
  const C G1 = std::polar(e.coupling1, e.phase1);
  const C G2 = std::polar(e.coupling2, e.phase2);
  std::array<std::array<C, 6>, 6> A{};
  // da1/dt = -(i Delta1 - g) a1 - i J a2 - i G1 (b + b^dag)
  A[0][0] = -(1i * e.detuning1 - e.net_gain);
  A[0][2] = -1i * p.hopping;
  A[0][4] = A[0][5] = -1i * G1;
  // da2/dt = -(i Delta2 + f) a2 - i J a1 - i G2 (b + b^dag)
  A[2][2] = -(1i * e.detuning2 + e.net_loss);
  A[2][0] = -1i * p.hopping;
  A[2][4] = A[2][5] = -1i * G2;
  // db/dt = -(i w + gamma) b - i (G1 a1^dag + G1^* a1 + G2 a2^dag + G2^* a2)
  A[4][4] = -(1i * p.omega_m + p.gamma_m);
  A[4][0] = -1i * std::conj(G1);
  A[4][1] = -1i * G1;
  A[4][2] = -1i * std::conj(G2);
  A[4][3] = -1i * G2;
  // Conjugate rows.
  for (int r : {0, 2, 4})
    for (int c = 0; c < 6; ++c) {
      const int cc = (c % 2 == 0) ? c + 1 : c - 1;
      A[r + 1][cc] = std::conj(A[r][c]);
    }

  // Quadratures q = T z with T block-diagonal [[1, 1], [-i, i]] / sqrt2.
  std::array<std::array<C, 6>, 6> T{}, Tinv{};
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < 3; ++k) {
    T[2 * k][2 * k] = s;
    T[2 * k][2 * k + 1] = s;
    T[2 * k + 1][2 * k] = -1i * s;
    T[2 * k + 1][2 * k + 1] = 1i * s;
    // inverse: o = (X + i Y)/sqrt2, o^dag = (X - i Y)/sqrt2
    Tinv[2 * k][2 * k] = s;
    Tinv[2 * k][2 * k + 1] = 1i * s;
    Tinv[2 * k + 1][2 * k] = s;
    Tinv[2 * k + 1][2 * k + 1] = -1i * s;
  }
  Matrix m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      C acc{};
      for (int k = 0; k < 6; ++k)
        for (int l = 0; l < 6; ++l) acc += T[i][k] * A[k][l] * Tinv[l][j];
      REQUIRE(std::abs(acc.imag()) < 1e-14);
      m(i, j) = acc.real();
    }
  return m;
}

}  // namespace

TEST_CASE("real-coupling drift has the documented layout") {
  const SystemParams p = reference_device();
  const EffectiveParams e = fig2_point(0.0, 0.1);
  const Matrix m = build_drift(e, p).matrix;
  const double g = -0.1;
  const double f = 0.2;
  const Matrix expected{
      {g, 1.0, 0.0, 0.2, 0.0, 0.0},   {-1.0, g, -0.2, 0.0, -0.4, 0.0},    {0.0, 0.2, -f, 1.0, 0.0, 0.0},
      {-0.2, 0.0, -1.0, -f, -0.4, 0.0}, {0.0, 0.0, 0.0, 0.0, -1e-5, 1.0}, {-0.4, 0.0, -0.4, 0.0, -1.0, -1e-5},
  };
  CHECK(max_abs(m - expected) < 1e-16);
}

TEST_CASE("general builder equals the complex-mode linearization") {
  acceptance::Uniform u(5);
  for (int k = 0; k < 200; ++k) {
    EffectiveParams e = random_effective(u);
    e.phase1 = wrap_phase(u(0, 7));
    e.phase2 = wrap_phase(u(0, 7));
    const SystemParams p = random_system(u);
    CHECK(max_abs(build_drift_general(e, p).matrix - complex_mode_drift(e, p)) < 1e-14);
  }
  SECTION("quarter-turn phase") {
    EffectiveParams e = fig2_point(0.0, 0.1);
    e.phase1 = e.phase2 = std::numbers::pi / 2;
    const Matrix m = build_drift_general(e, reference_device()).matrix;
    CHECK(max_abs(m - complex_mode_drift(e, reference_device())) < 1e-14);
    CHECK_THAT(m(0, 4), WithinAbs(0.4, 1e-15));
    CHECK_THAT(m(1, 4), WithinAbs(0.0, 1e-15));
    CHECK_THAT(m(5, 1), WithinAbs(-0.4, 1e-15));
  }
}

TEST_CASE("real and general builders agree bitwise at zero phase") {
  acceptance::Uniform u(9);
  for (int k = 0; k < 1000; ++k) {
    const EffectiveParams e = random_effective(u);
    const SystemParams p = random_system(u);
    CHECK(build_drift(e, p).matrix == build_drift_general(e, p).matrix);
    CHECK_THAT(trace(build_drift(e, p).matrix),
               WithinAbs(2 * e.net_gain - 2 * e.net_loss - 2 * p.gamma_m, 1e-12));
  }
}

TEST_CASE("build_drift refuses complex couplings; auto picks the right builder") {
  EffectiveParams e = fig2_point(0.0, 0.1);
  e.phase2 = 0.5;
  CHECK_THROWS_AS(build_drift(e, reference_device()), PreconditionError);
  CHECK(build_drift_auto(e, reference_device()).matrix == build_drift_general(e, reference_device()).matrix);
}

TEST_CASE("diffusion matrix") {
  SystemParams p = reference_device();
  const DiffusionMatrix d = build_diffusion(p);
  CHECK(d.matrix(0, 0) == 0.1);
  CHECK(d.matrix(3, 3) == 0.1);
  CHECK_THAT(d.matrix(4, 4), WithinRel(1e-5 * 201.0, 1e-15));
  CHECK(d.matrix(5, 5) == d.matrix(4, 4));
  CHECK(d.matrix(0, 1) == 0.0);
  CHECK_FALSE(d.no_thermalization);

  p.gamma_m = 0.0;
  const DiffusionMatrix iso = build_diffusion(p);
  CHECK(iso.no_thermalization);
  CHECK(iso.matrix(4, 4) == 0.0);

  p.nbar = -1.0;
  CHECK_THROWS_AS(build_diffusion(p), ValidationError);
  CHECK_THROWS_AS(DiffusionMatrix(Matrix(5, 5)), DimensionError);
  CHECK_THROWS_AS(DiffusionMatrix(Matrix::identity(6) + Matrix{{0, 1, 0, 0, 0, 0},
                                                                  {0, 0, 0, 0, 0, 0},
                                                                  {0, 0, 0, 0, 0, 0},
                                                                  {0, 0, 0, 0, 0, 0},
                                                                  {0, 0, 0, 0, 0, 0},
                                                                  {0, 0, 0, 0, 0, 0}}),
                  DimensionError);
}

TEST_CASE("characteristic polynomial matches an independent reference") {
  // Coefficients of det(sI - M) at (gs, fs) = (0, 0.1), computed independently.
  const Matrix m = build_drift(fig2_point(0.0, 0.1), reference_device()).matrix;
  const std::vector<double> c = characteristic_polynomial(m);
  const std::array<double, 7> expected = {0.7185600000973594, 0.5208194720635997, 2.799612720220999,
                                          1.2360442000600003, 3.2100120001, 0.6000200000000002, 1.0};
  for (std::size_t k = 0; k < 7; ++k) CHECK_THAT(c[k], WithinAbs(expected[k], 1e-12));
}

TEST_CASE("Routh-Hurwitz on textbook polynomials") {
  // (s+1)(s+2)(s+3) = s^3 + 6 s^2 + 11 s + 6
  CHECK(routh_hurwitz_stable({6, 11, 6, 1}));
  // (s-1)(s+2)(s+3) = s^3 + 4 s^2 + s - 6
  CHECK_FALSE(routh_hurwitz_stable({-6, 1, 4, 1}));
  // s^2 + 1: marginal, not strictly stable
  CHECK_FALSE(routh_hurwitz_stable({1, 0, 1}));
  // s^4 + s^3 + s^2 + s + 1: primitive fifth roots of unity, two with Re > 0
  CHECK_FALSE(routh_hurwitz_stable({1, 1, 1, 1, 1}));
  CHECK(routh_hurwitz_stable({1}));
}

TEST_CASE("stability report at reference points") {
  const SystemParams p = reference_device();
  const StabilityReport baseline = stability(build_drift(fig2_point(0.0, 0.0), p));
  CHECK(baseline.stable);
  CHECK(baseline.hurwitz_agrees);
  CHECK_THAT(baseline.max_real_part, WithinAbs(-0.0330655675577894, 1e-12));

  const StabilityReport lossy = stability(build_drift(fig2_point(0.0, 0.1), p));
  CHECK_THAT(lossy.max_real_part, WithinAbs(-0.0415832761720382, 1e-12));
  REQUIRE(lossy.spectrum.size() == 6);

  // Strong net gain in cavity 1 destabilizes.
  const StabilityReport gain = stability(build_drift(fig2_point(0.5, 0.0), p));
  CHECK_FALSE(gain.stable);
  CHECK_FALSE(gain.hurwitz_stable);
}

TEST_CASE("QR and Routh-Hurwitz agree on random physical drifts") {
  acceptance::Uniform u(21);
  std::size_t stable = 0;
  std::size_t mismatches = 0;
  for (int k = 0; k < 10000; ++k) {
    SystemParams p = reference_device();
    p.hopping = u(0.0, 1.0);
    p.kappa1 = u(0.0, 1.0);
    p.kappa2 = u(0.0, 1.0);
    OperatingPoint op = reference_operating_point();
    op.coupling1 = u(0.0, 0.5);
    op.coupling2 = u(0.0, 0.5);
    op.detuning1 = u(-1.5, 1.5);
    op.detuning2 = u(-1.5, 1.5);
    op.sat_gain = u(0.0, 0.3);
    op.sat_loss = u(0.0, 0.3);
    const StabilityReport r = stability(build_drift(resolve_effective(p, op), p));
    // Marginal points are allowed to disagree; nothing else is.
    if (!r.hurwitz_agrees && std::abs(r.max_real_part) > 1e-9) ++mismatches;
    stable += r.stable ? 1 : 0;
  }
  CHECK(mismatches == 0);
  CHECK(stable > 100);
  CHECK(stable < 9900);
}
