/// Exact 2x2 complex matrix algebra, the su(2) <-> R^3 identification,
/// hermitian projectors onto projective lines, and the closed-form
/// exponential of trace-free matrices.
#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace circleton {

using Complex = std::complex<double>;

/// Absolute tolerance for su(2) membership: |tr M| and ||M + M^H||.
inline constexpr double su2_tol = 1e-10;

/// Scientific-notation rendering for diagnostics.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// 2x2 complex matrix, row-major [[a, b], [c, d]]. Plain value type.
struct Matrix2C {
  Complex a{}, b{}, c{}, d{};

  static Matrix2C identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2C zero() { return {}; }

  Complex trace() const { return a + d; }
  Complex det() const { return a * d - b * c; }

  Matrix2C transpose() const { return {a, c, b, d}; }
  Matrix2C conj() const {
    return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)};
  }
  Matrix2C adjoint() const {
    return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
  }

  /// General inverse via the adjugate. Throws on near-singular input.
  Matrix2C inverse() const {
    const Complex dt = det();
    if (std::abs(dt) < 1e3 * std::numeric_limits<double>::min())
      throw std::domain_error("Matrix2C::inverse: singular matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  /// Frobenius norm.
  double norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) +
                     std::norm(d));
  }

  bool finite() const {
    auto ok = [](Complex z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    };
    return ok(a) && ok(b) && ok(c) && ok(d);
  }

  Matrix2C& operator+=(const Matrix2C& m) {
    a += m.a; b += m.b; c += m.c; d += m.d;
    return *this;
  }
  Matrix2C& operator-=(const Matrix2C& m) {
    a -= m.a; b -= m.b; c -= m.c; d -= m.d;
    return *this;
  }
  Matrix2C& operator*=(Complex s) {
    a *= s; b *= s; c *= s; d *= s;
    return *this;
  }
};

inline Matrix2C operator+(Matrix2C x, const Matrix2C& y) { return x += y; }
inline Matrix2C operator-(Matrix2C x, const Matrix2C& y) { return x -= y; }
inline Matrix2C operator-(const Matrix2C& x) {
  return {-x.a, -x.b, -x.c, -x.d};
}
inline Matrix2C operator*(const Matrix2C& x, const Matrix2C& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
inline Matrix2C operator*(Complex s, Matrix2C m) { return m *= s; }
inline Matrix2C operator*(Matrix2C m, Complex s) { return m *= s; }
inline Matrix2C operator*(double s, Matrix2C m) { return m *= Complex(s); }
inline Matrix2C operator*(Matrix2C m, double s) { return m *= Complex(s); }
inline Matrix2C operator/(Matrix2C m, Complex s) { return m *= 1.0 / s; }

inline double distance(const Matrix2C& x, const Matrix2C& y) {
  return (x - y).norm();
}

inline Matrix2C commutator(const Matrix2C& x, const Matrix2C& y) {
  return x * y - y * x;
}

/// Orthonormal su(2) basis.
inline Matrix2C sigma1() { return {0.0, 1.0, -1.0, 0.0}; }
inline Matrix2C sigma2() { return {0.0, Complex(0, 1), Complex(0, 1), 0.0}; }
inline Matrix2C sigma3() { return {Complex(0, 1), 0.0, 0.0, Complex(0, -1)}; }

/// Point of R^3 in the basis (sigma3, sigma1, sigma2): the matrix is
/// y*sigma1 + z*sigma2 + x*sigma3.
struct Su2Vector {
  double x{}, y{}, z{};

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Su2Vector operator+(Su2Vector u, const Su2Vector& v) {
  return {u.x + v.x, u.y + v.y, u.z + v.z};
}
inline Su2Vector operator-(Su2Vector u, const Su2Vector& v) {
  return {u.x - v.x, u.y - v.y, u.z - v.z};
}
inline Su2Vector operator*(double s, Su2Vector v) {
  return {s * v.x, s * v.y, s * v.z};
}
inline double distance(const Su2Vector& u, const Su2Vector& v) {
  return (u - v).norm();
}

inline Matrix2C su2_embed(const Su2Vector& v) {
  if (!v.finite()) throw std::invalid_argument("su2_embed: non-finite input");
  return {Complex(0, v.x), Complex(v.y, v.z), Complex(-v.y, v.z),
          Complex(0, -v.x)};
}

/// Membership test: trace-free anti-hermitian within su2_tol (absolute).
inline bool is_su2(const Matrix2C& m) {
  return m.finite() && (m + m.adjoint()).norm() <= su2_tol &&
         std::abs(m.trace()) <= su2_tol;
}

inline Su2Vector su2_coordinates(const Matrix2C& m) {
  if (!is_su2(m)) throw std::invalid_argument("su2_coordinates: not in su(2)");
  return {m.a.imag(), m.b.real(), m.b.imag()};
}

/// |X| = sqrt(det X) for X in su(2); coincides with the Euclidean norm.
inline double su2_norm(const Matrix2C& x) {
  if (!is_su2(x)) throw std::invalid_argument("su2_norm: not in su(2)");
  return std::sqrt(std::max(0.0, x.det().real()));
}

/// <X, Y> = -1/2 tr(XY).
inline double su2_inner(const Matrix2C& x, const Matrix2C& y) {
  if (!is_su2(x) || !is_su2(y))
    throw std::invalid_argument("su2_inner: not in su(2)");
  return -0.5 * (x * y).trace().real();
}

/// X x Y = 1/2 [X, Y].
inline Matrix2C su2_cross(const Matrix2C& x, const Matrix2C& y) {
  if (!is_su2(x) || !is_su2(y))
    throw std::invalid_argument("su2_cross: not in su(2)");
  return 0.5 * commutator(x, y);
}

/// Splits M into its su(2) part and reports the Frobenius norm of what was
/// discarded (hermitian part plus the trace of the anti-hermitian part).
struct Su2Projection {
  Matrix2C part;
  double remainder;
};

inline Su2Projection su2_project(const Matrix2C& m) {
  Matrix2C anti = 0.5 * (m - m.adjoint());
  anti -= (0.5 * anti.trace()) * Matrix2C::identity();
  return {anti, (m - anti).norm()};
}

/// exp(M) for trace-free M: cosh(mu) I + sinh(mu)/mu M, mu^2 = -det M.
/// Both coefficient functions are even in mu, so the square-root branch is
/// immaterial; the mu -> 0 limit uses the series of sinh(mu)/mu.
inline Matrix2C expm_tracefree(const Matrix2C& m) {
  if (std::abs(m.trace()) > su2_tol)
    throw std::invalid_argument("expm_tracefree: trace exceeds tolerance");
  const Complex w = -m.det();  // mu^2
  const Complex mu = std::sqrt(w);
  Complex ch, sh;
  if (std::abs(mu) < 1e-4) {
    ch = 1.0 + w / 2.0 + w * w / 24.0;
    sh = 1.0 + w / 6.0 + w * w / 120.0;
  } else {
    ch = std::cosh(mu);
    sh = std::sinh(mu) / mu;
  }
  return ch * Matrix2C::identity() + sh * m;
}

/// A line in CP^1 stored as a unit representative with canonical phase
/// (first entry of modulus > 1e-12 is made real positive), so equality of
/// stored components is well defined.
class ProjectiveLine {
 public:
  ProjectiveLine(Complex a, Complex b) {
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    if (!(n > 0.0) || !std::isfinite(n))
      throw std::invalid_argument("ProjectiveLine: zero or non-finite pair");
    a /= n;
    b /= n;
    const Complex lead = std::abs(a) > 1e-12 ? a : b;
    const Complex phase = lead / std::abs(lead);
    a_ = a / phase;
    b_ = b / phase;
  }

  static ProjectiveLine basis0() { return {1.0, 0.0}; }  // [1:0]
  static ProjectiveLine basis1() { return {0.0, 1.0} ; } // [0:1]

  Complex first() const { return a_; }
  Complex second() const { return b_; }

  ProjectiveLine orthogonal() const {
    return {-std::conj(b_), std::conj(a_)};
  }

  friend bool operator==(const ProjectiveLine& l, const ProjectiveLine& r) {
    return l.a_ == r.a_ && l.b_ == r.b_;
  }

 private:
  Complex a_, b_;
};

/// Sine of the angle between two lines; 0 iff equal as projective points.
inline double projective_distance(const ProjectiveLine& l,
                                  const ProjectiveLine& r) {
  return std::abs(l.first() * r.second() - l.second() * r.first());
}

/// Hermitian rank-1 projector v v^H onto the line.
inline Matrix2C hermitian_projector(const ProjectiveLine& l) {
  const Complex a = l.first(), b = l.second();
  return {a * std::conj(a), a * std::conj(b), b * std::conj(a),
          b * std::conj(b)};
}

/// Image of a line under an invertible matrix.
inline ProjectiveLine apply(const Matrix2C& m, const ProjectiveLine& l) {
  return {m.a * l.first() + m.b * l.second(),
          m.c * l.first() + m.d * l.second()};
}

}  // namespace circleton
