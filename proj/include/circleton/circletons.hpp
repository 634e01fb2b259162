/// Resonance points of multiply wrapped circles, circleton synthesis by
/// sequential simple-factor dressing, the closed-form circleton curvature,
/// bending energy, peak counting and multi-circleton enumeration.
#pragma once

#include <numbers>
#include <sstream>
#include <vector>

#include "circleton/dressing.hpp"
#include "circleton/frames.hpp"

namespace circleton {

/// Resonance point of an omega-wrapped unit circle: the k-th non-real
/// lambda at which the circle monodromy is +-I, alpha = i sqrt(1 - k^2/w^2).
struct ResonancePoint {
  int k{};
  Complex alpha;
};

/// The omega - 1 resonance points with k = 1..omega-1; empty for omega = 1.
inline std::vector<ResonancePoint> resonance_points(int omega) {
  if (omega < 1) throw std::invalid_argument("resonance_points: omega < 1");
  std::vector<ResonancePoint> out;
  out.reserve(omega - 1);
  for (int k = 1; k < omega; ++k) {
    const double ratio = static_cast<double>(k) / omega;
    out.push_back({k, Complex(0.0, std::sqrt(1.0 - ratio * ratio))});
  }
  return out;
}

/// Wrapping number omega and the strictly increasing resonance indices used
/// as simple-factor singularities; kappa is fixed to 1 (radius-1 circles).
/// Empty ks with omega = 1 denotes the undressed unit circle.
struct CircletonSpec {
  int omega{};
  std::vector<int> ks;

  void validate() const {
    if (omega < 1) throw std::invalid_argument("CircletonSpec: omega < 1");
    int prev = 0;
    for (int k : ks) {
      if (k <= prev)
        throw std::invalid_argument(
            "CircletonSpec: resonance indices must be strictly increasing "
            "(each may be used only once)");
      if (k < 1 || k >= omega)
        throw std::invalid_argument(
            "CircletonSpec: resonance indices must satisfy 1 <= k < omega");
      prev = k;
    }
  }

  std::string label() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < ks.size(); ++i)
      os << ks[i] << (i + 1 < ks.size() ? "," : "");
    os << ';' << omega << ')';
    return os.str();
  }
};

/// Composite Simpson quadrature of kappa^2 over one period; the grid is
/// period-open, the closing sample repeats the first. An odd interval count
/// falls back to one trapezoid cell (reported through the flag).
inline double bending_energy_of(const std::vector<double>& kappa, double h,
                                bool* used_trapezoid_cell = nullptr) {
  const std::size_t n = kappa.size();  // intervals over the period
  if (n < 2) throw std::invalid_argument("bending_energy: too few samples");
  auto sq = [&](std::size_t i) {
    const double v = kappa[i % n];  // cyclic closure
    return v * v;
  };
  if (used_trapezoid_cell) *used_trapezoid_cell = false;
  std::size_t m = n;
  double tail = 0.0;
  if (n % 2 != 0) {
    m = n - 1;  // Simpson on the even part, trapezoid on the last cell
    tail = 0.5 * h * (sq(n - 1) + sq(n));
    if (used_trapezoid_cell) *used_trapezoid_cell = true;
  }
  double acc = sq(0) + sq(m);
  for (std::size_t i = 1; i < m; i += 2) acc += 4.0 * sq(i);
  for (std::size_t i = 2; i < m; i += 2) acc += 2.0 * sq(i);
  return acc * h / 3.0 + tail;
}

inline double bending_energy(const CurveSamples& curve,
                             bool* used_trapezoid_cell = nullptr) {
  return bending_energy_of(curve.kappa, curve.step, used_trapezoid_cell);
}

/// Strict local maxima of the curvature over one period, cyclic, after
/// merging plateaus whose neighbor differences stay within 1e-9. A constant
/// signal has none.
inline int count_curvature_peaks_of(const std::vector<double>& kappa,
                                    double plateau_tol = 1e-9) {
  const std::size_t n = kappa.size();
  if (n < 3)
    throw std::invalid_argument("count_curvature_peaks: too few samples");
  // Find a sample that starts a run (its cyclic predecessor differs).
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(kappa[i] - kappa[(i + n - 1) % n]) > plateau_tol) {
      start = i;
      break;
    }
  }
  if (start == n) return 0;  // one big plateau

  std::vector<double> runs;  // plateau-merged values, cyclic order
  std::size_t i = start;
  do {
    double value = kappa[i];
    std::size_t j = i;
    while ((j + 1) % n != start &&
           std::abs(kappa[(j + 1) % n] - kappa[j]) <= plateau_tol) {
      j = (j + 1) % n;
      value = std::max(value, kappa[j]);
    }
    runs.push_back(value);
    i = (j + 1) % n;
  } while (i != start);

  const std::size_t m = runs.size();
  if (m == 1) return 0;
  int peaks = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const double prev = runs[(r + m - 1) % m], next = runs[(r + 1) % m];
    if (runs[r] > prev && runs[r] > next) ++peaks;
  }
  return peaks;
}

inline int count_curvature_peaks(const CurveSamples& curve) {
  if (curve.kappa.size() < 1024)
    throw std::invalid_argument(
        "count_curvature_peaks: need >= 1024 samples per period");
  return count_curvature_peaks_of(curve.kappa);
}

/// The closed-form signed curvature of a (k, omega)-circleton.
inline double circleton_curvature(int k, int omega, double t) {
  if (k < 1 || k >= omega)
    throw std::invalid_argument("circleton_curvature: need 1 <= k < omega");
  const double kd = k, w = omega;
  const double k2 = kd * kd, w2 = w * w;
  const double diff = k2 - w2;
  const double s = std::sqrt(1.0 - k2 / w2);
  const double ct = std::cos(kd * t / w), st = std::sin(kd * t / w);
  const double c2t = std::cos(2.0 * kd * t / w),
               s2t = std::sin(2.0 * kd * t / w);
  const double num =
      diff * (2.0 * kd * w * s * (2.0 * st - s2t) + (w2 - 2.0 * k2) * c2t +
              4.0 * diff * ct) +
      5.0 * k2 * w2 - 3.0 * w2 * w2;
  const double den =
      w * (4.0 * kd * s * st * (diff * ct + w2) - k2 * w + 3.0 * w2 * w) +
      (2.0 * k2 * k2 - 3.0 * k2 * w2 + w2 * w2) * c2t + 4.0 * w2 * diff * ct;
  if (std::abs(den) < 1e-9)
    throw std::runtime_error(
        "circleton_curvature: denominator vanishes at t = " +
        std::to_string(t));
  return num / den;
}

/// Builds the (k_1,..,k_m; omega)-circleton over one period [0, 2 pi omega]
/// from closed-form circle frames dressed sequentially by the diagonal
/// simple factors h_{[1:0], alpha_k}. `samples` counts the grid intervals
/// of the exported period-open curve.
inline CurveSamples make_circleton(const CircletonSpec& spec, int samples) {
  spec.validate();
  if (samples < 256)
    throw std::invalid_argument("make_circleton: need samples >= 256");

  const double period = 2.0 * std::numbers::pi * spec.omega;
  const auto resonances = resonance_points(spec.omega);
  std::vector<Complex> alphas;
  for (int k : spec.ks) alphas.push_back(resonances[k - 1].alpha);

  FrameFamily fam = circle_frame_family(1.0, period, samples, alphas);
  for (std::size_t i = 0; i < alphas.size(); ++i)
    fam = dress_frame(fam, {ProjectiveLine::basis0(), alphas[i]}).family;

  CurveSamples curve = frame_curve(fam, spec.label() + "-circleton");
  curve.meta.omega = spec.omega;
  curve.meta.ks = spec.ks;
  curve.meta.alphas = alphas;
  curve.meta.bending_energy =
      bending_energy(curve, &curve.meta.simpson_trapezoid_cell);
  curve.meta.peak_count = count_curvature_peaks_of(curve.kappa);
  return curve;
}

/// All size-element subsets of {1, .., omega-1} in lexicographic order;
/// C(omega-1, size) many.
inline std::vector<CircletonSpec> enumerate_multicircletons(int omega,
                                                            int size) {
  if (omega < 1)
    throw std::invalid_argument("enumerate_multicircletons: omega < 1");
  if (size < 0 || size > omega - 1)
    throw std::invalid_argument(
        "enumerate_multicircletons: size must lie in [0, omega-1]");
  std::vector<CircletonSpec> out;
  std::vector<int> pick(size);
  for (int i = 0; i < size; ++i) pick[i] = i + 1;
  while (true) {
    out.push_back({omega, pick});
    if (size == 0) break;
    int i = size - 1;
    while (i >= 0 && pick[i] == omega - 1 - (size - 1 - i)) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

inline std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace circleton
