/// Extended frames F_lambda(t): closed forms for circles, fixed-step RK4
/// integration for arbitrary complex curvature, and recovery of curves,
/// curvature/torsion, monodromy and closure status.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "circleton/algebra.hpp"

namespace circleton {

/// Coefficient matrix V(q) = 1/2 [[i lambda, q], [-conj(q), -i lambda]].
inline Matrix2C coefficient_matrix(Complex q, Complex lambda) {
  const Complex il(0, 1);
  return {0.5 * il * lambda, 0.5 * q, -0.5 * std::conj(q), -0.5 * il * lambda};
}

/// dV/dlambda, independent of q and lambda.
inline Matrix2C coefficient_matrix_lambda_derivative() {
  return 0.5 * sigma3();
}

/// sin(z)/z with the small-argument series.
inline Complex sinc(Complex z) {
  const Complex z2 = z * z;
  if (std::abs(z) < 1e-4) return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  return std::sin(z) / z;
}

/// (z cos z - sin z)/z^3, entire, value -1/3 at 0.
inline Complex sinc_cubed_defect(Complex z) {
  const Complex z2 = z * z;
  if (std::abs(z) < 1e-3) return -1.0 / 3.0 + z2 / 30.0 - z2 * z2 / 840.0;
  return (z * std::cos(z) - std::sin(z)) / (z * z2);
}

/// Closed-form circle frame exp(t V(kappa, lambda)):
///   cos(ts/2) I + t sinc(ts/2) V,  s = sqrt(kappa^2 + lambda^2),
/// with the s -> 0 limit I + t V built into sinc. det = 1 up to rounding.
inline Matrix2C circle_frame(double kappa, Complex lambda, double t) {
  const Complex z = 0.5 * t * std::sqrt(kappa * kappa + lambda * lambda);
  return std::cos(z) * Matrix2C::identity() +
         (t * sinc(z)) * coefficient_matrix(kappa, lambda);
}

/// Analytic d/dlambda of circle_frame. Writing w = kappa^2 + lambda^2 and
/// z = (t/2) sqrt(w), both coefficient functions are entire in w:
///   dF/dlambda = 2 lambda [ -(t^2/8) sinc(z) I + (t^3/8) j(z) V ]
///                + t sinc(z) sigma3/2,   j(z) = (z cos z - sin z)/z^3.
inline Matrix2C circle_frame_lambda_derivative(double kappa, Complex lambda,
                                               double t) {
  const Complex w = kappa * kappa + lambda * lambda;
  const Complex z = 0.5 * t * std::sqrt(w);
  const Complex g = t * sinc(z);
  const Matrix2C v = coefficient_matrix(kappa, lambda);
  return (2.0 * lambda) *
             ((-t * t / 8.0) * sinc(z) * Matrix2C::identity() +
              (t * t * t / 8.0) * sinc_cubed_defect(z) * v) +
         g * coefficient_matrix_lambda_derivative();
}

/// Complex curvature q(t) = kappa(t) exp[i int_0^t tau], either in closed
/// form (constant kappa, tau) or as samples on a uniform grid (evaluated
/// between nodes by 4-point Lagrange interpolation).
class ComplexCurvatureSignal {
 public:
  static ComplexCurvatureSignal constant(double kappa, double tau) {
    ComplexCurvatureSignal s;
    s.kappa_ = kappa;
    s.tau_ = tau;
    s.closed_form_ = true;
    return s;
  }

  static ComplexCurvatureSignal sampled(double t0, double dt,
                                        std::vector<Complex> values) {
    if (values.size() < 4)
      throw std::invalid_argument("ComplexCurvatureSignal: need >= 4 samples");
    if (!(dt > 0.0))
      throw std::invalid_argument("ComplexCurvatureSignal: dt must be > 0");
    for (Complex v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument(
            "ComplexCurvatureSignal: non-finite sample");
    ComplexCurvatureSignal s;
    s.t0_ = t0;
    s.dt_ = dt;
    s.values_ = std::move(values);
    return s;
  }

  bool closed_form() const { return closed_form_; }
  const std::vector<Complex>& values() const { return values_; }
  double start() const { return t0_; }
  double step() const { return dt_; }

  Complex operator()(double t) const {
    if (closed_form_) return kappa_ * std::exp(Complex(0, tau_ * t));
    const double u = (t - t0_) / dt_;
    const long n = static_cast<long>(values_.size());
    long i = static_cast<long>(std::floor(u));
    i = std::clamp(i, 1l, n - 3);  // stencil i-1 .. i+2
    const double x = u - static_cast<double>(i);
    const Complex f0 = values_[i - 1], f1 = values_[i], f2 = values_[i + 1],
                  f3 = values_[i + 2];
    // Lagrange basis on nodes -1, 0, 1, 2.
    const double l0 = -x * (x - 1.0) * (x - 2.0) / 6.0;
    const double l1 = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
    const double l2 = -(x + 1.0) * x * (x - 2.0) / 2.0;
    const double l3 = (x + 1.0) * x * (x - 1.0) / 6.0;
    return l0 * f0 + l1 * f1 + l2 * f2 + l3 * f3;
  }

 private:
  bool closed_form_ = false;
  double kappa_ = 0.0, tau_ = 0.0;
  double t0_ = 0.0, dt_ = 1.0;
  std::vector<Complex> values_;
};

/// Sampled extended frame family: F_0(t) and its lambda-derivative at
/// lambda = 0 on a uniform grid, plus evaluations at designated complex
/// lambda points. Normalized so F(0) = I, D(0) = 0.
struct FrameFamily {
  double step{};
  std::vector<double> times;            // t_i = i * step, inclusive of tmax
  std::vector<Matrix2C> frame0;         // F_0(t_i)
  std::vector<Matrix2C> deriv0;         // dF/dlambda|_0 (t_i)
  std::vector<std::pair<Complex, std::vector<Matrix2C>>> extra;
  double period{};                      // period candidate (= tmax)

  std::size_t size() const { return times.size(); }

  const std::vector<Matrix2C>* samples_at(Complex lambda) const {
    for (const auto& [l, v] : extra)
      if (std::abs(l - lambda) < 1e-12) return &v;
    return nullptr;
  }
};

/// Checks the FrameFamily contract: unimodular and unitary F_0 within tol,
/// F(0) = I, D(0) = 0. Returns the worst violation.
inline double frame_family_defect(const FrameFamily& f) {
  double worst = 0.0;
  const Matrix2C id = Matrix2C::identity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Matrix2C& m = f.frame0[i];
    worst = std::max(worst, std::abs(m.det() - 1.0));
    worst = std::max(worst, distance(m * m.adjoint(), id));
  }
  if (!f.frame0.empty()) worst = std::max(worst, distance(f.frame0[0], id));
  if (!f.deriv0.empty()) worst = std::max(worst, f.deriv0[0].norm());
  return worst;
}

/// Integrates Fdot = F V(q, lambda), F(0) = I with classical RK4 at fixed
/// step, together with the variational equation
///   Ddot = D V(q, 0) + F dV/dlambda
/// at lambda = 0, and the plain value equation at each requested lambda.
inline FrameFamily integrate_frame(const ComplexCurvatureSignal& q,
                                   double tmax, int steps,
                                   const std::vector<Complex>& extra_lambdas =
                                       {}) {
  if (steps < 16) throw std::invalid_argument("integrate_frame: steps < 16");
  if (!(tmax > 0.0)) throw std::invalid_argument("integrate_frame: tmax <= 0");

  FrameFamily fam;
  fam.step = tmax / steps;
  fam.period = tmax;
  const double h = fam.step;
  fam.times.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) fam.times[i] = h * i;

  const Matrix2C dv = coefficient_matrix_lambda_derivative();

  // lambda = 0 with the variational equation.
  {
    fam.frame0.reserve(steps + 1);
    fam.deriv0.reserve(steps + 1);
    Matrix2C f = Matrix2C::identity();
    Matrix2C d = Matrix2C::zero();
    fam.frame0.push_back(f);
    fam.deriv0.push_back(d);
    for (int i = 0; i < steps; ++i) {
      const double t = h * i;
      const Matrix2C v1 = coefficient_matrix(q(t), 0.0);
      const Matrix2C v2 = coefficient_matrix(q(t + 0.5 * h), 0.0);
      const Matrix2C v3 = coefficient_matrix(q(t + h), 0.0);

      const Matrix2C kf1 = f * v1;
      const Matrix2C kd1 = d * v1 + f * dv;
      const Matrix2C kf2 = (f + 0.5 * h * kf1) * v2;
      const Matrix2C kd2 = (d + 0.5 * h * kd1) * v2 + (f + 0.5 * h * kf1) * dv;
      const Matrix2C kf3 = (f + 0.5 * h * kf2) * v2;
      const Matrix2C kd3 = (d + 0.5 * h * kd2) * v2 + (f + 0.5 * h * kf2) * dv;
      const Matrix2C kf4 = (f + h * kf3) * v3;
      const Matrix2C kd4 = (d + h * kd3) * v3 + (f + h * kf3) * dv;

      f += (h / 6.0) * (kf1 + 2.0 * kf2 + 2.0 * kf3 + kf4);
      d += (h / 6.0) * (kd1 + 2.0 * kd2 + 2.0 * kd3 + kd4);
      if (!f.finite())
        throw std::runtime_error("integrate_frame: non-finite state");
      fam.frame0.push_back(f);
      fam.deriv0.push_back(d);
    }
    if (std::abs(f.det() - 1.0) > 1e-6)
      throw std::runtime_error(
          "integrate_frame: determinant drift exceeds 1e-6; step too coarse");
  }

  for (Complex lambda : extra_lambdas) {
    std::vector<Matrix2C> vals;
    vals.reserve(steps + 1);
    Matrix2C f = Matrix2C::identity();
    vals.push_back(f);
    for (int i = 0; i < steps; ++i) {
      const double t = h * i;
      const Matrix2C v1 = coefficient_matrix(q(t), lambda);
      const Matrix2C v2 = coefficient_matrix(q(t + 0.5 * h), lambda);
      const Matrix2C v3 = coefficient_matrix(q(t + h), lambda);
      const Matrix2C k1 = f * v1;
      const Matrix2C k2 = (f + 0.5 * h * k1) * v2;
      const Matrix2C k3 = (f + 0.5 * h * k2) * v2;
      const Matrix2C k4 = (f + h * k3) * v3;
      f += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      vals.push_back(f);
    }
    if (std::abs(f.det() - 1.0) > 1e-6)
      throw std::runtime_error(
          "integrate_frame: determinant drift exceeds 1e-6; step too coarse");
    fam.extra.emplace_back(lambda, std::move(vals));
  }
  return fam;
}

/// Closed-form frame family of the radius 1/kappa circle.
inline FrameFamily circle_frame_family(double kappa, double tmax, int steps,
                                       const std::vector<Complex>&
                                           extra_lambdas = {}) {
  if (steps < 1) throw std::invalid_argument("circle_frame_family: steps < 1");
  FrameFamily fam;
  fam.step = tmax / steps;
  fam.period = tmax;
  fam.times.resize(steps + 1);
  fam.frame0.resize(steps + 1);
  fam.deriv0.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double t = fam.step * i;
    fam.times[i] = t;
    fam.frame0[i] = circle_frame(kappa, 0.0, t);
    fam.deriv0[i] = circle_frame_lambda_derivative(kappa, 0.0, t);
  }
  for (Complex lambda : extra_lambdas) {
    std::vector<Matrix2C> vals(steps + 1);
    for (int i = 0; i <= steps; ++i)
      vals[i] = circle_frame(kappa, lambda, fam.times[i]);
    fam.extra.emplace_back(lambda, std::move(vals));
  }
  return fam;
}

/// Sym formula gamma = 2 D F0^{-1}, projected onto su(2). The discarded
/// remainder must stay below 1e-6 or the frame family is inconsistent.
inline Su2Vector sym_curve(const Matrix2C& f0, const Matrix2C& d) {
  if (std::abs(f0.det() - 1.0) > 1e-8)
    throw std::invalid_argument("sym_curve: det F0 differs from 1");
  const auto [part, remainder] = su2_project(2.0 * d * f0.inverse());
  if (remainder > 1e-6)
    throw std::runtime_error(
        "sym_curve: non-su(2) remainder " + sci(remainder) +
        " signals an inconsistent frame family");
  return su2_coordinates(part);
}

struct MonodromyPair {
  Matrix2C value;             // M_0(rho)
  Matrix2C lambda_derivative; // M'_lambda(rho)|_0
};

/// Reads the monodromy (F_0(rho), D(rho)); rho must lie on the grid.
inline MonodromyPair monodromy(const FrameFamily& f, double rho) {
  const double idx = rho / f.step;
  const long i = std::lround(idx);
  if (i < 0 || i >= static_cast<long>(f.size()) ||
      std::abs(idx - static_cast<double>(i)) > 1e-9 * std::max(1.0, idx))
    throw std::invalid_argument("monodromy: rho is not on the time grid");
  return {f.frame0[i], f.deriv0[i]};
}

/// Closing conditions M_0 = +-I and M'_0 = 0 within tol.
inline bool closing_check(const Matrix2C& m0, const Matrix2C& m0prime,
                          double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("closing_check: tol <= 0");
  const Matrix2C id = Matrix2C::identity();
  return std::min(distance(m0, id), distance(m0, -id)) < tol &&
         m0prime.norm() < tol;
}

namespace detail {

/// Fourth-order first derivative of a matrix sequence on a uniform grid;
/// one-sided stencils at the two samples nearest each end.
inline std::vector<Matrix2C> differentiate(const std::vector<Matrix2C>& f,
                                           double h) {
  const std::size_t n = f.size();
  if (n < 5)
    throw std::invalid_argument("differentiate: need at least 5 samples");
  std::vector<Matrix2C> d(n);
  const double s = 1.0 / (12.0 * h);
  d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
              3.0 * f[4]);
  d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
  d[n - 2] = s * (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] +
                  6.0 * f[n - 4] - f[n - 5]);
  d[n - 1] = s * (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] -
                  16.0 * f[n - 4] + 3.0 * f[n - 5]);
  return d;
}

struct ExtractedCurvature {
  std::vector<Complex> q;
  double max_diagonal;  // worst |(F^{-1} Fdot)_{11}| over the grid
};

/// Stencil core shared by the public extraction and the curve pipeline.
inline ExtractedCurvature extract_curvature(const FrameFamily& fam) {
  const auto dots = differentiate(fam.frame0, fam.step);
  ExtractedCurvature out;
  out.q.resize(fam.size());
  out.max_diagonal = 0.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const Matrix2C w = fam.frame0[i].inverse() * dots[i];
    out.max_diagonal = std::max(out.max_diagonal, std::abs(w.a));
    out.q[i] = 2.0 * w.b;
  }
  return out;
}

}  // namespace detail

/// Reads q(t) = 2 (F0^{-1} Fdot)_{12} off the lambda = 0 samples. The
/// diagonal residual of F0^{-1} Fdot must vanish (lambda = 0), else the
/// input is not a frame family. The default tolerance assumes a grid fine
/// enough that the fourth-order truncation sits below 1e-6; callers on
/// coarse grids raise it to the truncation floor.
inline ComplexCurvatureSignal complex_curvature_from_frames(
    const FrameFamily& fam, double residual_tol = 1e-6) {
  auto extracted = detail::extract_curvature(fam);
  if (extracted.max_diagonal > residual_tol)
    throw std::runtime_error(
        "complex_curvature_from_frames: diagonal residual " +
        sci(extracted.max_diagonal) + " signals a non-frame input");
  return ComplexCurvatureSignal::sampled(fam.times.front(), fam.step,
                                         std::move(extracted.q));
}

/// Curvature kappa = |q| and torsion tau = Im(qdot/q); torsion is flagged
/// undefined where |q| falls below the threshold.
struct CurvatureTorsion {
  std::vector<double> kappa;
  std::vector<double> tau;
  std::vector<std::uint8_t> tau_defined;
};

inline CurvatureTorsion curvature_torsion(const std::vector<Complex>& q,
                                          double dt,
                                          double undefined_threshold = 1e-9) {
  const std::size_t n = q.size();
  CurvatureTorsion out;
  out.kappa.resize(n);
  out.tau.assign(n, 0.0);
  out.tau_defined.assign(n, 0);
  std::vector<Matrix2C> lifted(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.kappa[i] = std::abs(q[i]);
    lifted[i] = {q[i], 0.0, 0.0, 0.0};  // reuse the matrix differentiator
  }
  const auto dq = detail::differentiate(lifted, dt);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.kappa[i] >= undefined_threshold) {
      out.tau[i] = (dq[i].a / q[i]).imag();
      out.tau_defined[i] = 1;
    }
  }
  return out;
}

inline CurvatureTorsion curvature_torsion(const ComplexCurvatureSignal& q,
                                          double undefined_threshold = 1e-9) {
  if (q.closed_form())
    throw std::invalid_argument(
        "curvature_torsion: sampled signal required; closed forms are exact");
  return curvature_torsion(q.values(), q.step(), undefined_threshold);
}

/// Arc-length samples of a curve with curvature/torsion and provenance
/// metadata. The grid is period-open: t_i = i h for i < samples, with the
/// closing point t = period used only for the closure error.
struct CurveMetadata {
  std::string source;
  double period{};
  double closure_error{};
  double bending_energy{};
  int peak_count{};
  int omega{};
  std::vector<int> ks;
  std::vector<Complex> alphas;
  int sample_count{};
  bool simpson_trapezoid_cell{};
};

struct CurveSamples {
  double step{};
  std::vector<double> t;
  std::vector<Su2Vector> points;
  std::vector<double> kappa;
  std::vector<double> tau;
  std::vector<std::uint8_t> tau_defined;
  CurveMetadata meta;
};

/// Reconstructs the curve of a frame family over one period. When the
/// complex curvature is real up to a constant phase (true for circles and
/// everything obtained from them by diagonal dressing), the signed value is
/// stored; otherwise kappa = |q|.
inline CurveSamples frame_curve(const FrameFamily& fam,
                                const std::string& source = {}) {
  if (fam.size() < 6)
    throw std::invalid_argument("frame_curve: family too short");
  CurveSamples out;
  const std::size_t n = fam.size() - 1;  // export the period-open grid
  out.step = fam.step;
  out.meta.source = source;
  out.meta.period = fam.period;
  out.meta.sample_count = static_cast<int>(n);

  std::vector<Su2Vector> pts(fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i)
    pts[i] = sym_curve(fam.frame0[i], fam.deriv0[i]);
  out.meta.closure_error = distance(pts.back(), pts.front());

  // Guard against non-frame input with a floor that tracks the honest
  // fourth-order truncation of the stencil: |d^5 W| scales like the fifth
  // power of the signal magnitude, so size it off the extracted q itself.
  // A genuine non-frame produces diagonals on the scale of q, orders of
  // magnitude above this floor on any usable grid.
  auto extracted = detail::extract_curvature(fam);
  double qmax = 0.0;
  for (Complex v : extracted.q) qmax = std::max(qmax, std::abs(v));
  const double truncation_floor =
      30.0 * std::pow(1.0 + qmax, 5) * std::pow(fam.step, 4);
  if (extracted.max_diagonal > std::max(1e-6, truncation_floor))
    throw std::runtime_error(
        "frame_curve: diagonal residual " + sci(extracted.max_diagonal) +
        " signals a non-frame input");
  const auto& q = extracted.q;

  // Constant-phase alignment: q = e^{ic} r(t) with real r recovers the
  // smooth signed curvature.
  std::size_t imax = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (std::abs(q[i]) > std::abs(q[imax])) imax = i;
  std::vector<double> kappa(q.size());
  bool aligned = std::abs(q[imax]) > 1e-12;
  if (aligned) {
    const Complex phase = q[imax] / std::abs(q[imax]);
    double max_im = 0.0, max_re = 0.0;
    for (Complex v : q) {
      const Complex r = v * std::conj(phase);
      max_im = std::max(max_im, std::abs(r.imag()));
      max_re = std::max(max_re, std::abs(r.real()));
    }
    aligned = max_im <= 1e-6 * std::max(1.0, max_re);
    if (aligned)
      for (std::size_t i = 0; i < q.size(); ++i)
        kappa[i] = (q[i] * std::conj(phase)).real();
  }
  auto ct = curvature_torsion(q, fam.step);
  if (!aligned) kappa = ct.kappa;

  out.t.assign(fam.times.begin(), fam.times.begin() + n);
  out.points.assign(pts.begin(), pts.begin() + n);
  out.kappa.assign(kappa.begin(), kappa.begin() + n);
  out.tau.assign(ct.tau.begin(), ct.tau.begin() + n);
  out.tau_defined.assign(ct.tau_defined.begin(), ct.tau_defined.begin() + n);
  return out;
}

}  // namespace circleton
