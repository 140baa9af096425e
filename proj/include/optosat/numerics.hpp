#pragma once

// Small dense real-matrix kernels: eigenvalues, LU solves, determinants and a
// fixed-step RK4 integrator for the Lyapunov differential equation.
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "optosat/errors.hpp"

namespace optosat {

using Complex = std::complex<double>;
using ComplexList = std::vector<Complex>;

/// Row-major dense real matrix. Entries are checked finite on construction.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    check_shape();
    check_finite();
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    check_shape();
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    check_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows)
      : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    check_shape();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    check_finite();
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  /// Copy of the nr x nc block starting at (r0, c0).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
    Matrix out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_shape() const {
    if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
  }
  void check_finite() const {
    if (!all_finite()) throw DimensionError("matrix entries must be finite");
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

inline void require_square(const Matrix& a, const char* who) {
  if (!a.square()) {
    throw DimensionError(std::string(who) + ": expected a square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline Matrix operator+(Matrix a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum: shape mismatch");
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
  return a;
}

inline Matrix operator-(Matrix a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference: shape mismatch");
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] -= bd[i];
  return a;
}

inline Matrix operator*(double s, Matrix a) {
  for (double& v : a.data()) v *= s;
  return a;
}

inline double frobenius_norm(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double trace(const Matrix& a) {
  require_square(a, "trace");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

/// (A + A^T) / 2
inline Matrix symmetrized(const Matrix& a) {
  require_square(a, "symmetrized");
  Matrix s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

// ---------------------------------------------------------------------------
// Eigenvalues

namespace detail {

// Diagonal similarity scaling by powers of two so row and column norms are
// comparable. Exact in floating point, improves QR accuracy when entries span
// many orders of magnitude (mechanical damping ~1e-5 next to O(1) couplings).
inline void balance(Matrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transforms. Entries below the subdiagonal are zeroed on return.
inline void to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

inline double copy_sign(double magnitude, double sign) { return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
inline ComplexList hessenberg_qr(Matrix& a, std::size_t max_sweeps_per_root) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(n, 0.0);
  std::vector<double> wi(n, 0.0);

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  std::size_t total_sweeps = 0;
  while (nn >= 0) {
    std::size_t its = 0;
    int l = 0;
    do {
      // Look for a single small subdiagonal element.
      for (l = nn; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + copy_sign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -z;
            wi[nn] = z;
          }
          nn -= 2;
        } else {
          if (its == max_sweeps_per_root) {
            throw ConvergenceError("eigenvalues: QR iteration did not converge after " +
                                       std::to_string(total_sweeps) + " sweeps",
                                   total_sweeps);
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++total_sweeps;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = copy_sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  ComplexList out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = Complex(wr[i], wi[i]);
  return out;
}

}  // namespace detail

/// Sort order used throughout: descending real part, ties by descending imaginary part.
inline void sort_spectrum(ComplexList& values) {
  std::sort(values.begin(), values.end(), [](const Complex& lhs, const Complex& rhs) {
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() > rhs.imag();
  });
}

/// All eigenvalues of a real square matrix (dimension <= 64), with algebraic
/// multiplicity, sorted by sort_spectrum.
inline ComplexList eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  if (a.rows() > 64) throw DimensionError("eigenvalues: dimension above 64 is not supported");
  Matrix work = a;
  detail::balance(work);
  detail::to_hessenberg(work);
  ComplexList values = detail::hessenberg_qr(work, 60);
  sort_spectrum(values);
  return values;
}

// ---------------------------------------------------------------------------
// LU with partial pivoting

class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& a) : lu_(a), perm_(a.rows()) {
    require_square(a, "LU decomposition");
    const std::size_t n = a.rows();
    const double scale = std::max(max_abs(a), std::numeric_limits<double>::min());
    const double threshold = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          piv = i;
        }
      }
      if (best <= threshold) {
        singular_ = true;
        min_pivot_ = std::min(min_pivot_, best);
        continue;
      }
      min_pivot_ = std::min(min_pivot_, best);
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        sign_ = -sign_;
      }
      const double inv = 1.0 / lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) * inv;
        lu_(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool singular() const noexcept { return singular_; }
  double min_pivot() const noexcept { return min_pivot_; }

  double determinant() const noexcept {
    double det = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
    return det;
  }

  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw DimensionError("solve_linear: right-hand side length mismatch");
    if (singular_) {
      throw SingularMatrixError("solve_linear: matrix is singular to working precision (pivot " +
                                    std::to_string(min_pivot_) + ")",
                                min_pivot_);
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] /= lu_(i, i);
    }
    return x;
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
  bool singular_ = false;
  double min_pivot_ = std::numeric_limits<double>::infinity();
};

inline std::vector<double> solve_linear(const Matrix& a, std::span<const double> b) {
  require_square(a, "solve_linear");
  if (b.size() != a.rows()) throw DimensionError("solve_linear: right-hand side length mismatch");
  return LuDecomposition(a).solve(b);
}

inline double determinant(const Matrix& a) {
  require_square(a, "determinant");
  switch (a.rows()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    default:
      return LuDecomposition(a).determinant();
  }
}

// ---------------------------------------------------------------------------
// Lyapunov differential equation  dV/dt = M V + V M^T + D

/// Preallocated classical RK4 stepper for dV/dt = M V + V M^T + D.
class LyapunovRk4 {
 public:
  LyapunovRk4(const Matrix& drift, const Matrix& inhomogeneity)
      : drift_(drift), inhom_(inhomogeneity), n_(drift.rows()), k1_(n_ * n_), k2_(n_ * n_), k3_(n_ * n_),
        k4_(n_ * n_), tmp_(n_ * n_) {
    require_square(drift, "integrate_linear_ode");
    if (inhomogeneity.rows() != n_ || inhomogeneity.cols() != n_) {
      throw DimensionError("integrate_linear_ode: inhomogeneity must match the drift matrix");
    }
  }

  /// Right-hand side evaluated at v (row-major, n*n) into out.
  void rate(std::span<const double> v, std::span<double> out) const {
    const auto m = drift_.data();
    const auto d = inhom_.data();
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        double s = d[i * n_ + j];
        for (std::size_t k = 0; k < n_; ++k) s += m[i * n_ + k] * v[k * n_ + j] + v[i * n_ + k] * m[j * n_ + k];
        out[i * n_ + j] = s;
      }
  }

  /// One step of size h, followed by symmetrization.
  void step(std::span<double> v, double h) {
    const std::size_t len = n_ * n_;
    rate(v, k1_);
    for (std::size_t i = 0; i < len; ++i) tmp_[i] = v[i] + 0.5 * h * k1_[i];
    rate(tmp_, k2_);
    for (std::size_t i = 0; i < len; ++i) tmp_[i] = v[i] + 0.5 * h * k2_[i];
    rate(tmp_, k3_);
    for (std::size_t i = 0; i < len; ++i) tmp_[i] = v[i] + h * k3_[i];
    rate(tmp_, k4_);
    for (std::size_t i = 0; i < len; ++i) v[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double s = 0.5 * (v[i * n_ + j] + v[j * n_ + i]);
        v[i * n_ + j] = s;
        v[j * n_ + i] = s;
      }
    for (std::size_t i = 0; i < len; ++i) {
      if (!std::isfinite(v[i])) {
        throw DivergenceError("integrate_linear_ode: state became non-finite (unstable drift or step too large)");
      }
    }
  }

  std::size_t dimension() const noexcept { return n_; }

 private:
  Matrix drift_;
  Matrix inhom_;
  std::size_t n_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Default integration step: a thousandth of a mechanical period (omega_m = 1).
inline constexpr double kDefaultOdeStep = 1e-3 * 2.0 * 3.14159265358979323846;

/// Integrates dV/dt = M V + V M^T + D from `initial` over [0, horizon] with
/// classical RK4. The step is shrunk slightly so the last step lands on horizon.
inline Matrix integrate_linear_ode(const Matrix& drift, const Matrix& inhomogeneity, const Matrix& initial,
                                   double step, double horizon) {
  if (!(step > 0.0)) throw PreconditionError("integrate_linear_ode: step must be positive");
  if (!(horizon >= step)) throw PreconditionError("integrate_linear_ode: horizon must be at least one step");
  LyapunovRk4 stepper(drift, inhomogeneity);
  if (initial.rows() != stepper.dimension() || initial.cols() != stepper.dimension()) {
    throw DimensionError("integrate_linear_ode: initial value must match the drift matrix");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  std::vector<double> v(initial.data().begin(), initial.data().end());
  for (std::size_t i = 0; i < steps; ++i) stepper.step(v, h);
  return Matrix(initial.rows(), initial.cols(), std::move(v));
}

}  // namespace optosat
