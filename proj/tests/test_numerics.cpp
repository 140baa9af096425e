#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "optosat/acceptance.hpp"
#include "optosat/numerics.hpp"

using namespace optosat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Matrix random_matrix(acceptance::Uniform& u, std::size_t n, double scale = 1.0) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = u(-scale, scale);
  return m;
}

Complex sum(const ComplexList& v) {
  Complex s{};
  for (const Complex& z : v) s += z;
  return s;
}

Complex product(const ComplexList& v) {
  Complex p{1.0, 0.0};
  for (const Complex& z : v) p *= z;
  return p;
}

}  // namespace

TEST_CASE("matrix construction rejects bad shapes and values") {
  CHECK_THROWS_AS(Matrix(0, 3), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Matrix({{1, 2}, {3}}), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2, std::numeric_limits<double>::quiet_NaN()), DimensionError);
  CHECK_THROWS_AS(Matrix(1, 1, std::numeric_limits<double>::infinity()), DimensionError);
}

TEST_CASE("basic matrix algebra") {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  CHECK(a * b == Matrix{{2, 1}, {4, 3}});
  CHECK(transpose(a) == Matrix{{1, 3}, {2, 4}});
  CHECK(a + b == Matrix{{1, 3}, {4, 4}});
  CHECK(a - a == Matrix(2, 2));
  CHECK(2.0 * a == Matrix{{2, 4}, {6, 8}});
  CHECK(trace(a) == 5.0);
  CHECK(max_abs(a) == 4.0);
  CHECK_THAT(frobenius_norm(a), WithinRel(std::sqrt(30.0), 1e-15));
  CHECK(symmetrized(a) == Matrix{{1, 2.5}, {2.5, 4}});
  CHECK(a.block(1, 0, 1, 2) == Matrix{{3, 4}});
  CHECK_THROWS_AS(a.block(1, 1, 2, 1), DimensionError);
  CHECK_THROWS_AS(a * Matrix(3, 3), DimensionError);
  CHECK_THROWS_AS(trace(Matrix(2, 3)), DimensionError);

  const std::vector<double> x{1.0, -1.0};
  CHECK(a * std::span<const double>(x) == std::vector<double>{-1.0, -1.0});
}

TEST_CASE("eigenvalues of small matrices with known spectra") {
  SECTION("diagonal") {
    const std::array<double, 3> d{-3.0, 2.0, 0.5};
    const ComplexList ev = eigenvalues(Matrix::diagonal(d));
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] == Complex(2.0, 0.0));
    CHECK(ev[1] == Complex(0.5, 0.0));
    CHECK(ev[2] == Complex(-3.0, 0.0));
  }
  SECTION("damped rotation gives a conjugate pair, positive imaginary part first") {
    const ComplexList ev = eigenvalues(Matrix{{-0.1, 1.0}, {-1.0, -0.1}});
    REQUIRE(ev.size() == 2);
    CHECK_THAT(ev[0].real(), WithinAbs(-0.1, 1e-14));
    CHECK_THAT(ev[0].imag(), WithinAbs(1.0, 1e-14));
    CHECK_THAT(ev[1].imag(), WithinAbs(-1.0, 1e-14));
  }
  SECTION("companion matrix of (s-1)(s-2)(s-3)(s-4)") {
    const Matrix c{{10, -35, 50, -24}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
    const ComplexList ev = eigenvalues(c);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK_THAT(ev[i].real(), WithinAbs(4.0 - static_cast<double>(i), 1e-10));
      CHECK_THAT(ev[i].imag(), WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("defective Jordan block") {
    const ComplexList ev = eigenvalues(Matrix{{-1.0, 1.0}, {0.0, -1.0}});
    CHECK_THAT(ev[0].real(), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(ev[1].real(), WithinAbs(-1.0, 1e-12));
  }
  SECTION("1x1 and rejection of oversize input") {
    CHECK(eigenvalues(Matrix{{-2.5}}) == ComplexList{Complex(-2.5, 0.0)});
    CHECK_THROWS_AS(eigenvalues(Matrix(65, 65)), DimensionError);
    CHECK_THROWS_AS(eigenvalues(Matrix(2, 3)), DimensionError);
  }
}

TEST_CASE("eigenvalues reproduce trace and determinant on random matrices") {
  acceptance::Uniform u(7);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 7);
    const Matrix a = random_matrix(u, n);
    const ComplexList ev = eigenvalues(a);
    REQUIRE(ev.size() == n);
    CHECK_THAT(sum(ev).real(), WithinAbs(trace(a), 1e-11));
    CHECK_THAT(sum(ev).imag(), WithinAbs(0.0, 1e-11));
    CHECK_THAT(product(ev).real(), WithinAbs(determinant(a), 1e-10));
    for (std::size_t i = 1; i < n; ++i) CHECK(ev[i - 1].real() >= ev[i].real());
  }
}

TEST_CASE("eigenvalues are residual-free: det(A - lambda I) vanishes") {
  acceptance::Uniform u(11);
  for (int k = 0; k < 50; ++k) {
    const Matrix a = random_matrix(u, 6);
    for (const Complex& lambda : eigenvalues(a)) {
      // Smallest singular value proxy: |det(A - lambda I)| relative to ||A||^n.
      std::vector<std::vector<Complex>> m(6, std::vector<Complex>(6));
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) m[i][j] = a(i, j) - (i == j ? lambda : Complex{});
      Complex det{1.0, 0.0};
      for (std::size_t c = 0; c < 6; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < 6; ++r)
          if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        if (piv != c) det = -det;
        det *= m[c][c];
        if (std::abs(m[c][c]) == 0.0) break;
        for (std::size_t r = c + 1; r < 6; ++r) {
          const Complex f = m[r][c] / m[c][c];
          for (std::size_t j = c; j < 6; ++j) m[r][j] -= f * m[c][j];
        }
      }
      CHECK(std::abs(det) < 1e-9);
    }
  }
}

TEST_CASE("LU solves, detects singularity and reports the determinant") {
  const Matrix a{{4, -2, 1}, {-2, 4, -2}, {1, -2, 4}};
  const std::vector<double> b{11, -16, 17};
  const std::vector<double> x = solve_linear(a, b);
  CHECK_THAT(x[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(x[1], WithinAbs(-2.0, 1e-14));
  CHECK_THAT(x[2], WithinAbs(3.0, 1e-14));
  CHECK_THAT(determinant(a), WithinRel(36.0, 1e-14));

  const Matrix singular{{1, 2, 3}, {2, 4, 6}, {1, 1, 1}};
  const LuDecomposition lu(singular);
  CHECK(lu.singular());
  CHECK_THROWS_AS(lu.solve(b), SingularMatrixError);
  CHECK_THROWS_AS(solve_linear(a, std::vector<double>{1, 2}), DimensionError);
}

TEST_CASE("determinant closed forms agree with LU") {
  acceptance::Uniform u(3);
  for (int k = 0; k < 100; ++k) {
    const Matrix a = random_matrix(u, 2);
    CHECK_THAT(determinant(a), WithinAbs(LuDecomposition(a).determinant(), 1e-15));
  }
  CHECK(determinant(Matrix{{-7.5}}) == -7.5);
}

TEST_CASE("RK4 Lyapunov integration matches the scalar closed form") {
  // dv/dt = 2 a v + d, v(0) = 0  =>  v(t) = d (exp(2 a t) - 1) / (2 a)
  const double a = -0.7;
  const double d = 1.3;
  const Matrix v = integrate_linear_ode(Matrix{{a}}, Matrix{{d}}, Matrix{{0.0}}, 1e-3, 2.0);
  const double exact = d * std::expm1(2.0 * a * 2.0) / (2.0 * a);
  CHECK_THAT(v(0, 0), WithinAbs(exact, 1e-12));
}

TEST_CASE("RK4 Lyapunov integration: homogeneous decay of a 2x2 state") {
  // dV/dt = M V + V M^T with M = -c I gives V(t) = V0 exp(-2 c t).
  const double c = 0.4;
  const Matrix v0{{1.0, 0.3}, {0.3, 2.0}};
  const Matrix v = integrate_linear_ode(-c * Matrix::identity(2), Matrix(2, 2), v0, 1e-3, 3.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK_THAT(v(i, j), WithinAbs(v0(i, j) * std::exp(-2.0 * c * 3.0), 1e-12));
}

TEST_CASE("RK4 integration rejects bad arguments and flags divergence") {
  const Matrix m{{-1.0}};
  CHECK_THROWS_AS(integrate_linear_ode(m, m, m, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(integrate_linear_ode(m, m, m, 0.1, 0.01), PreconditionError);
  CHECK_THROWS_AS(integrate_linear_ode(m, Matrix(2, 2), m, 0.1, 1.0), DimensionError);
  CHECK_THROWS_AS(integrate_linear_ode(Matrix{{400.0}}, m, Matrix{{1.0}}, 0.5, 200.0), DivergenceError);
}
