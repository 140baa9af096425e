#include <catch_amalgamated.hpp>

#include <cmath>

#include "optosat/acceptance.hpp"
#include "optosat/covariance.hpp"

using namespace optosat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Model {
  DriftMatrix drift;
  DiffusionMatrix diffusion;
};

Model reference_model(double gs, double fs, double nbar = 100.0) {
  SystemParams p = reference_device();
  p.nbar = nbar;
  OperatingPoint op = reference_operating_point();
  op.sat_gain = gs;
  op.sat_loss = fs;
  return {build_drift(resolve_effective(p, op), p), build_diffusion(p)};
}

// Closed form for an uncoupled set of damped modes: M = -k I + rotation,
// D = d I gives V = d / (2 k) I.
Model free_modes(double k, double w, double d) {
  Matrix m(6, 6);
  for (std::size_t j = 0; j < 3; ++j) {
    m(2 * j, 2 * j) = m(2 * j + 1, 2 * j + 1) = -k;
    m(2 * j, 2 * j + 1) = w;
    m(2 * j + 1, 2 * j) = -w;
  }
  return {DriftMatrix(m), DiffusionMatrix(d * Matrix::identity(6))};
}

}  // namespace

TEST_CASE("steady state of free damped oscillators is thermal") {
  const Model m = free_modes(0.25, 1.3, 0.8);
  const CovarianceMatrix v = solve_steady_state(m.drift, m.diffusion);
  CHECK(max_abs(v.matrix - 1.6 * Matrix::identity(6)) < 1e-14);
  CHECK(v.valid());
}

TEST_CASE("reference covariance entries match an independent Lyapunov solver") {
  const Model m = reference_model(0.0, 0.1);
  const CovarianceMatrix v = solve_steady_state(m.drift, m.diffusion);
  CHECK_THAT(v.matrix(0, 0), WithinRel(0.483895945478115, 1e-10));
  CHECK_THAT(v.matrix(4, 4), WithinRel(0.496142491656992, 1e-10));
  CHECK_THAT(v.matrix(0, 2), WithinRel(0.0407139390240718, 1e-9));
  CHECK(v.relative_residual < 1e-12);
}

TEST_CASE("solution is symmetric and positive definite with a tiny residual") {
  for (double fs : {0.0, 0.03, 0.1}) {
    const Model m = reference_model(0.01, fs);
    const CovarianceMatrix v = solve_steady_state(m.drift, m.diffusion);
    CHECK(v.matrix == transpose(v.matrix));
    CHECK(frobenius_norm(lyapunov_rate(m.drift.matrix, v.matrix, m.diffusion.matrix)) <=
          1e-9 * frobenius_norm(m.diffusion.matrix));
    for (const Complex& z : eigenvalues(v.matrix)) CHECK(z.real() > 0.0);
  }
}

TEST_CASE("saturable loss without its own noise drives the state below the uncertainty bound") {
  // The loss channel damps cavity 2 at fs + kappa2 while D only carries kappa2,
  // so the fluctuation-dissipation balance is broken. Reference values from an
  // independent solver.
  const std::vector<double> clean = physicality_diagnostics(solve_steady_state(
      reference_model(0.0, 0.0).drift, reference_model(0.0, 0.0).diffusion)).symplectic;
  CHECK_THAT(clean[0], WithinAbs(0.5, 1e-9));
  CHECK_THAT(clean[1], WithinAbs(0.50914883, 1e-8));
  CHECK_THAT(clean[2], WithinAbs(0.58087632, 1e-8));

  const Model gain = reference_model(0.1, 0.0);
  CHECK(physicality_diagnostics(solve_steady_state(gain.drift, gain.diffusion)).physical);

  const Model loss = reference_model(0.0, 0.1);
  const PhysicalityReport r = physicality_diagnostics(solve_steady_state(loss.drift, loss.diffusion));
  CHECK_FALSE(r.physical);
  CHECK_THAT(r.symplectic[0], WithinAbs(0.26887504, 1e-8));
  CHECK_THAT(r.symplectic[1], WithinAbs(0.36302205, 1e-8));
  CHECK_THAT(r.symplectic[2], WithinAbs(0.53097697, 1e-8));
}

TEST_CASE("direct solve agrees with ODE relaxation on the device") {
  const Model m = reference_model(0.0, 0.1, 5.0);
  const CovarianceMatrix direct = solve_steady_state(m.drift, m.diffusion);
  const CovarianceMatrix relaxed = integrate_to_steady_state(m.drift, m.diffusion, 1e-9, 2000.0, 0.01);
  CHECK(frobenius_norm(direct.matrix - relaxed.matrix) <= 1e-6 * frobenius_norm(direct.matrix));
}

TEST_CASE("random stable systems: residual and ODE agreement") {
  acceptance::Uniform u(17);
  for (int k = 0; k < 25; ++k) {
    const auto [drift, diffusion] = acceptance::random_stable_system(u);
    const CovarianceMatrix v = solve_steady_state(drift, diffusion);
    CHECK(v.relative_residual <= 1e-9);
    const CovarianceMatrix w = integrate_to_steady_state(drift, diffusion, 1e-10, 1e4);
    CHECK(frobenius_norm(v.matrix - w.matrix) <= 1e-6 * frobenius_norm(v.matrix));
  }
}

TEST_CASE("unstable and marginal drifts are refused") {
  const Model unstable = reference_model(0.5, 0.0);
  CHECK_THROWS_AS(solve_steady_state(unstable.drift, unstable.diffusion), UnstableSystemError);
  CHECK_THROWS_AS(integrate_to_steady_state(unstable.drift, unstable.diffusion, 1e-9, 10.0), UnstableSystemError);
  try {
    solve_steady_state(unstable.drift, unstable.diffusion);
  } catch (const UnstableSystemError& e) {
    CHECK(e.max_real_part() > 0.0);
  }

  const Model marginal = free_modes(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(solve_steady_state(marginal.drift, marginal.diffusion), UnstableSystemError);
}

TEST_CASE("slow relaxation exhausts the horizon") {
  const Model m = free_modes(1e-4, 1.0, 1.0);
  CHECK_THROWS_AS(integrate_to_steady_state(m.drift, m.diffusion, 1e-9, 5.0), SlowConvergenceError);
  CHECK_THROWS_AS(integrate_to_steady_state(m.drift, m.diffusion, 1e-9, 5.0, 0.0), PreconditionError);
}

TEST_CASE("symplectic eigenvalues") {
  SECTION("thermal product state") {
    const std::array<double, 6> d{0.5, 0.5, 2.0, 2.0, 7.0, 7.0};
    const std::vector<double> nu = symplectic_eigenvalues(Matrix::diagonal(d));
    REQUIRE(nu.size() == 3);
    CHECK_THAT(nu[0], WithinAbs(0.5, 1e-14));
    CHECK_THAT(nu[1], WithinAbs(2.0, 1e-14));
    CHECK_THAT(nu[2], WithinAbs(7.0, 1e-13));
  }
  SECTION("squeezing leaves them unchanged") {
    const double r = 0.7;
    const std::array<double, 2> d{0.5 * std::exp(2 * r), 0.5 * std::exp(-2 * r)};
    CHECK_THAT(symplectic_eigenvalues(Matrix::diagonal(d))[0], WithinAbs(0.5, 1e-14));
  }
  SECTION("unphysical matrix is flagged") {
    CovarianceMatrix v{0.2 * Matrix::identity(6)};
    CHECK_FALSE(physicality_diagnostics(v).physical);
  }
  CHECK_THROWS_AS(symplectic_eigenvalues(Matrix(3, 3)), DimensionError);
}

TEST_CASE("lyapunov operator applies M V + V M^T") {
  acceptance::Uniform u(2);
  Matrix m(3, 3), v(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      m(i, j) = u(-1, 1);
      v(i, j) = u(-1, 1);
    }
  const Matrix op = detail::lyapunov_operator(m);
  const std::vector<double> vec(v.data().begin(), v.data().end());
  const Matrix applied(3, 3, op * std::span<const double>(vec));
  CHECK(max_abs(applied - (m * v + v * transpose(m))) < 1e-15);
}
