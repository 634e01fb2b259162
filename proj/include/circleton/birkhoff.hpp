/// Truncated-Laurent numerical Birkhoff factorization on the circle C_r,
/// the Symes map, the isospectral action and spectral-curve data. This is
/// the independent oracle against which the closed-form dressing is
/// checked.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "circleton/dressing.hpp"
#include "circleton/frames.hpp"

namespace circleton {

struct BigCellError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PotentialError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix Laurent series sum_{|j| <= order} c_j lambda^j on the circle of
/// the given radius; 2 order + 1 coefficients are the discrete Fourier dual
/// of as many samples on C_r.
struct LaurentLoop {
  double radius = 1.0;
  int order = 0;
  std::vector<Matrix2C> coeffs;  // power j stored at index j + order

  static std::vector<Complex> nodes(double r, int count) {
    std::vector<Complex> out(count);
    for (int m = 0; m < count; ++m)
      out[m] = r * std::exp(Complex(0, 2.0 * std::numbers::pi * m / count));
    return out;
  }

  static LaurentLoop from_coefficients(double r, int order,
                                       std::vector<Matrix2C> cs) {
    if (static_cast<int>(cs.size()) != 2 * order + 1)
      throw std::invalid_argument("LaurentLoop: need 2 order + 1 coefficients");
    return {r, order, std::move(cs)};
  }

  static LaurentLoop constant(double r, const Matrix2C& m) {
    return {r, 0, {m}};
  }

  /// Coefficients from samples at the 2N+1 standard nodes (count odd):
  /// c_j = (1/M r^j) sum_m s_m e^{-2 pi i j m / M}.
  static LaurentLoop from_samples(double r,
                                  const std::vector<Matrix2C>& samples) {
    const int m_count = static_cast<int>(samples.size());
    if (m_count < 1 || m_count % 2 == 0)
      throw std::invalid_argument("LaurentLoop: need an odd sample count");
    const int n = (m_count - 1) / 2;
    LaurentLoop loop{r, n, std::vector<Matrix2C>(m_count)};
    for (int j = -n; j <= n; ++j) {
      Matrix2C acc = Matrix2C::zero();
      for (int m = 0; m < m_count; ++m) {
        const double angle = -2.0 * std::numbers::pi * j * m / m_count;
        acc += samples[m] * std::exp(Complex(0, angle));
      }
      loop.at(j) = acc * (1.0 / (m_count * std::pow(r, j)));
    }
    return loop;
  }

  Matrix2C coefficient(int j) const {
    if (j < -order || j > order) return Matrix2C::zero();
    return coeffs[j + order];
  }
  Matrix2C& at(int j) { return coeffs[j + order]; }

  Matrix2C eval(Complex lambda) const {
    Matrix2C acc = coefficient(0);
    Complex pos = 1.0, neg = 1.0;
    for (int j = 1; j <= order; ++j) {
      pos *= lambda;
      neg /= lambda;
      acc += coefficient(j) * pos + coefficient(-j) * neg;
    }
    return acc;
  }

  std::vector<Matrix2C> samples() const {
    const auto ns = nodes(radius, 2 * order + 1);
    std::vector<Matrix2C> out(ns.size());
    for (std::size_t m = 0; m < ns.size(); ++m) out[m] = eval(ns[m]);
    return out;
  }

  double max_coefficient_norm() const {
    double r = 0.0;
    for (const auto& c : coeffs) r = std::max(r, c.norm());
    return r;
  }

  /// On-circle magnitude ||c_j|| r^j of one coefficient; the plain
  /// coefficients are meaningless across powers when r != 1.
  double scaled_norm(int j) const {
    return coefficient(j).norm() * std::pow(radius, j);
  }

  double max_scaled_norm() const {
    double r = 0.0;
    for (int j = -order; j <= order; ++j) r = std::max(r, scaled_norm(j));
    return r;
  }

  /// max |det - 1| over the sample nodes.
  double unimodularity_defect() const {
    double worst = 0.0;
    for (const auto& s : samples())
      worst = std::max(worst, std::abs(s.det() - 1.0));
    return worst;
  }
};

/// Trapezoidal Cauchy integral (1/2 pi i) oint f(l) l^{-j-1} dl over C_r,
/// i.e. the j-th Laurent coefficient of f.
inline Matrix2C cauchy_coefficient(const std::function<Matrix2C(Complex)>& f,
                                   double r, int power, int node_count) {
  Matrix2C acc = Matrix2C::zero();
  for (int m = 0; m < node_count; ++m) {
    const double angle = 2.0 * std::numbers::pi * m / node_count;
    const Complex node = r * std::exp(Complex(0, angle));
    acc += f(node) * std::exp(Complex(0, -angle * power));
  }
  return acc * (1.0 / (node_count * std::pow(r, power)));
}

struct BirkhoffFactors {
  LaurentLoop plus;
  LaurentLoop minus;
  double residual;   // max node deviation of plus * minus from the input
  double condition;  // condition estimate of the coefficient system
};

/// g = plus * minus with minus holding only nonpositive powers, constant
/// term I (the Lambda^-_{r,1} normalization), and plus only nonnegative
/// powers. Solves the block-Toeplitz least-squares system expressing that
/// g * minus^{-1} has no negative powers, then recomposes. Ill-conditioned
/// systems and large recomposition residuals are both reported as lying
/// outside the big cell / under-resolved.
inline BirkhoffFactors birkhoff_factorize(const LaurentLoop& g,
                                          double tol = 1e-8) {
  const auto g_samples = g.samples();
  double sample_scale = 1.0;
  for (const auto& s : g_samples) sample_scale = std::max(sample_scale,
                                                          s.norm());
  // |det - 1| has a roundoff floor of order ||g||^2 eps.
  double det_defect = 0.0;
  for (const auto& s : g_samples)
    det_defect = std::max(det_defect, std::abs(s.det() - 1.0));
  if (det_defect > 1e-8 * sample_scale * sample_scale)
    throw std::invalid_argument(
        "birkhoff_factorize: loop is not unimodular on C_r, defect " +
        sci(det_defect));
  const int n = g.order;
  if (n == 0)
    return {g, LaurentLoop::constant(g.radius, Matrix2C::identity()), 0.0,
            1.0};

  // Unknowns h_j, j = -n..-1, of h = minus^{-1} = I + sum h_j lambda^j.
  // Equations: coefficient m of g*h vanishes for m = -2n..-1, i.e.
  //   sum_j G_{m-j} h_j = -G_m  (h acts columnwise from the right).
  // The system is assembled in the scaled variable mu = lambda/r, whose
  // coefficients G_k r^k carry their on-circle magnitude; without the
  // scaling, truncation noise at strongly negative m swamps the solve.
  auto scaled = [&](int k) {
    return g.coefficient(k) * std::pow(g.radius, k);
  };
  Eigen::MatrixXcd a(4 * n, 2 * n);
  Eigen::MatrixXcd b(4 * n, 2);
  a.setZero();
  b.setZero();
  for (int mi = 0; mi < 2 * n; ++mi) {
    const int m = -2 * n + mi;
    for (int bj = 0; bj < n; ++bj) {
      const int j = -n + bj;
      const Matrix2C gc = scaled(m - j);
      a.block<2, 2>(2 * mi, 2 * bj) << gc.a, gc.b, gc.c, gc.d;
    }
    const Matrix2C gm = scaled(m);
    b.block<2, 2>(2 * mi, 0) << -gm.a, -gm.b, -gm.c, -gm.d;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
  const auto& r_diag = qr.matrixR().diagonal();
  const double rmax = std::abs(r_diag(0));
  const double rmin = std::abs(r_diag(r_diag.size() - 1));
  const double condition = rmax / std::max(rmin, 1e-300);
  if (!(rmin > 0.0) || condition > 1e12)
    throw BigCellError(
        "birkhoff_factorize: coefficient system is singular or "
        "ill-conditioned (cond estimate " +
        sci(condition) +
        "); input outside the big cell or under-resolved");
  const Eigen::MatrixXcd h = qr.solve(b);

  // h in the scaled variable; h(lambda_m) = I + sum h~_j e^{2 pi i j m / M}.
  LaurentLoop hloop{1.0, n,
                    std::vector<Matrix2C>(2 * n + 1, Matrix2C::zero())};
  hloop.at(0) = Matrix2C::identity();
  for (int bj = 0; bj < n; ++bj)
    hloop.at(-n + bj) = {h(2 * bj, 0), h(2 * bj, 1), h(2 * bj + 1, 0),
                         h(2 * bj + 1, 1)};

  const auto node_list = LaurentLoop::nodes(g.radius, 2 * n + 1);
  const auto unit_nodes = LaurentLoop::nodes(1.0, 2 * n + 1);
  std::vector<Matrix2C> minus_samples(node_list.size());
  std::vector<Matrix2C> plus_samples(node_list.size());
  for (std::size_t m = 0; m < node_list.size(); ++m) {
    const Matrix2C hv = hloop.eval(unit_nodes[m]);
    minus_samples[m] = hv.inverse();
    plus_samples[m] = g.eval(node_list[m]) * hv;
  }
  LaurentLoop minus = LaurentLoop::from_samples(g.radius, minus_samples);
  LaurentLoop plus = LaurentLoop::from_samples(g.radius, plus_samples);
  for (int j = 1; j <= n; ++j) minus.at(j) = Matrix2C::zero();
  for (int j = -n; j < 0; ++j) plus.at(j) = Matrix2C::zero();

  double residual = 0.0;
  for (std::size_t m = 0; m < node_list.size(); ++m)
    residual = std::max(
        residual, distance(plus.eval(node_list[m]) * minus.eval(node_list[m]),
                           g_samples[m]));
  if (residual > tol * sample_scale)
    throw BigCellError(
        "birkhoff_factorize: recomposition residual " +
        sci(residual) +
        " exceeds tolerance; input outside the big cell or truncation "
        "order insufficient");
  return {std::move(plus), std::move(minus), residual, condition};
}

/// Reality condition g^* = g: unitary at the two real points of C_r and
/// g(conj lambda)^H g(lambda) = I over the sample nodes.
inline bool reality_check(const LaurentLoop& g, double tol = 1e-8) {
  if (!(g.radius > 0.0))
    throw std::invalid_argument("reality_check: radius must be positive");
  const Matrix2C id = Matrix2C::identity();
  for (double sgn : {1.0, -1.0}) {
    const Matrix2C v = g.eval(sgn * g.radius);
    if (distance(v * v.adjoint(), id) > tol) return false;
  }
  for (const Complex node : LaurentLoop::nodes(g.radius, 2 * g.order + 1)) {
    const Matrix2C gv = g.eval(node);
    const Matrix2C gc = g.eval(std::conj(node));
    if (distance(gc.adjoint() * gv, id) > tol) return false;
  }
  return true;
}

/// Constant finite type potential xi(lambda) = sum_{j=-g}^{1} xi_j lambda^j
/// with xi_1 = sigma3/2, all xi_j in su(2), and xi_0 orthogonal to xi_1.
class FiniteTypePotential {
 public:
  static FiniteTypePotential make(int genus, std::vector<Matrix2C> cs) {
    if (genus < 0) throw PotentialError("genus must be >= 0");
    if (static_cast<int>(cs.size()) != genus + 2)
      throw PotentialError(
          "coefficient list must contain g + 2 matrices (j = -g..1)");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!is_su2(cs[i]))
        throw PotentialError("xi_" + std::to_string(static_cast<int>(i) -
                                                    genus) +
                             " must lie in su(2)");
    }
    const Matrix2C top = 0.5 * sigma3();
    if (distance(cs.back(), top) > su2_tol)
      throw PotentialError("xi_1 must equal (1/2) sigma_3");
    cs.back() = top;
    if (std::abs(su2_inner(cs[genus], sigma3())) > su2_tol)
      throw PotentialError("xi_0 must be orthogonal to sigma_3");
    FiniteTypePotential p;
    p.genus_ = genus;
    p.coeffs_ = std::move(cs);
    return p;
  }

  /// xi = sigma3/2 lambda + 1/2 [[0, u+iv], [-u+iv, 0]].
  static FiniteTypePotential genus0(double u, double v) {
    return make(0, {coefficient_matrix(Complex(u, v), 0.0), 0.5 * sigma3()});
  }

  int genus() const { return genus_; }
  const std::vector<Matrix2C>& coefficients() const { return coeffs_; }
  Matrix2C coefficient(int j) const { return coeffs_[j + genus_]; }

  Matrix2C eval(Complex lambda) const {
    Matrix2C acc = coefficient(1) * lambda + coefficient(0);
    Complex neg = 1.0;
    for (int j = -1; j >= -genus_; --j) {
      neg /= lambda;
      acc += coefficient(j) * neg;
    }
    return acc;
  }

 private:
  int genus_ = 0;
  std::vector<Matrix2C> coeffs_;
};

/// det xi as a Laurent polynomial with real coefficients:
/// det xi = 1/4 lambda^2 + sum_{i=0}^{2g} a_i lambda^{-i}, plus the branch
/// points (roots of lambda^{2g} det xi) and the genus.
struct SpectralData {
  std::vector<double> a;
  std::vector<Complex> branch_points;
  int genus;
};

namespace detail {

/// Laurent coefficients of det xi, degrees -2g..2 (index k + 2g).
inline std::vector<Complex> det_series(const FiniteTypePotential& xi) {
  const int g = xi.genus();
  const int len = g + 2;  // entry polynomials, degrees -g..1
  std::vector<Complex> pa(len), pb(len), pc(len), pd(len);
  for (int i = 0; i < len; ++i) {
    const Matrix2C& m = xi.coefficients()[i];
    pa[i] = m.a;
    pb[i] = m.b;
    pc[i] = m.c;
    pd[i] = m.d;
  }
  std::vector<Complex> det(2 * len - 1, 0.0);  // degrees -2g..2
  for (int i = 0; i < len; ++i)
    for (int j = 0; j < len; ++j)
      det[i + j] += pa[i] * pd[j] - pb[i] * pc[j];
  return det;
}

/// Roots of the degree-(2g+2) polynomial lambda^{2g} det xi via the
/// companion matrix; no distinctness enforcement.
inline std::vector<Complex> branch_points_unchecked(
    const FiniteTypePotential& xi) {
  const auto det = det_series(xi);
  const int deg = static_cast<int>(det.size()) - 1;  // = 2g + 2
  const Complex lead = det[deg];
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -det[i] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> roots(deg);
  for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

inline double branch_radius(const FiniteTypePotential& xi) {
  double r = 0.0;
  for (Complex z : branch_points_unchecked(xi)) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace detail

inline SpectralData spectral_det(const FiniteTypePotential& xi) {
  const int g = xi.genus();
  const auto det = detail::det_series(xi);  // degrees -2g..2 at index k + 2g
  if (std::abs(det[2 * g + 2] - 0.25) > 1e-12)
    throw std::runtime_error(
        "spectral_det: leading coefficient differs from 1/4");
  if (std::abs(det[2 * g + 1]) > 1e-12)
    throw std::runtime_error("spectral_det: lambda^1 term does not vanish");
  SpectralData out;
  out.genus = g;
  out.a.resize(2 * g + 1);
  for (int i = 0; i <= 2 * g; ++i) {
    const Complex ai = det[2 * g - i];
    if (std::abs(ai.imag()) > 1e-10)
      throw std::runtime_error(
          "spectral_det: coefficient a_" + std::to_string(i) +
          " has imaginary part beyond tolerance (reality violated)");
    out.a[i] = ai.real();
  }
  out.branch_points = detail::branch_points_unchecked(xi);
  for (std::size_t i = 0; i < out.branch_points.size(); ++i)
    for (std::size_t j = i + 1; j < out.branch_points.size(); ++j)
      if (std::abs(out.branch_points[i] - out.branch_points[j]) < 1e-8)
        throw std::runtime_error(
            "spectral_det: repeated branch points (separation below 1e-8)");
  return out;
}

namespace detail {

/// Samples f on the standard nodes of C_r and converts to a loop, checking
/// that the truncated coefficient tail has decayed.
inline LaurentLoop loop_from_function(
    const std::function<Matrix2C(Complex)>& f, double r, int order,
    const char* who) {
  const auto ns = LaurentLoop::nodes(r, 2 * order + 1);
  std::vector<Matrix2C> samples(ns.size());
  for (std::size_t m = 0; m < ns.size(); ++m) samples[m] = f(ns[m]);
  LaurentLoop loop = LaurentLoop::from_samples(r, samples);
  const double scale = std::max(1.0, loop.max_scaled_norm());
  const double tail =
      std::max(loop.scaled_norm(order), loop.scaled_norm(-order));
  if (tail > 1e-12 * scale)
    throw std::runtime_error(std::string(who) +
                             ": truncation order too small, coefficient "
                             "tail has not decayed below 1e-12");
  return loop;
}

}  // namespace detail

struct SymesResult {
  Su2Vector point;
  LaurentLoop plus;
};

/// Symes map Phi(xi) = (exp t xi)_+ together with the Sym-formula curve
/// point 2 Phi' Phi^{-1}|_{lambda=0}, both via Birkhoff factorization and
/// Cauchy integrals over C_r.
inline SymesResult symes_map(const FiniteTypePotential& xi, double t, double r,
                             int order) {
  if (!(r > detail::branch_radius(xi)))
    throw std::invalid_argument(
        "symes_map: radius must exceed the largest branch-point modulus");
  const LaurentLoop loop = detail::loop_from_function(
      [&](Complex l) { return expm_tracefree(t * xi.eval(l)); }, r, order,
      "symes_map");
  BirkhoffFactors fac = birkhoff_factorize(loop);
  auto plus_eval = [&](Complex l) { return fac.plus.eval(l); };
  const Matrix2C c0 = cauchy_coefficient(plus_eval, r, 0, 2 * order + 1);
  const Matrix2C c1 = cauchy_coefficient(plus_eval, r, 1, 2 * order + 1);
  return {sym_curve(c0, c1), std::move(fac.plus)};
}

/// Isospectral action Pi(x) xi = phi_-(x) xi phi_-(x)^{-1} where phi_- is
/// the minus factor of exp(xi sum_i lambda^i x_i). Preserves det xi.
inline FiniteTypePotential isospectral_action(std::span<const double> x,
                                              const FiniteTypePotential& xi,
                                              double r, int order) {
  const int g = xi.genus();
  if (static_cast<int>(x.size()) != g)
    throw std::invalid_argument(
        "isospectral_action: flow vector length must equal the genus");
  if (g == 0) return xi;
  if (!(r > detail::branch_radius(xi)))
    throw std::invalid_argument(
        "isospectral_action: radius must exceed the branch radius");

  auto poly = [&](Complex l) {
    Complex acc = 0.0, pw = 1.0;
    for (int i = 0; i < g; ++i) {
      acc += x[i] * pw;
      pw *= l;
    }
    return acc;
  };
  const LaurentLoop loop = detail::loop_from_function(
      [&](Complex l) { return expm_tracefree(poly(l) * xi.eval(l)); }, r,
      order, "isospectral_action");
  const BirkhoffFactors fac = birkhoff_factorize(loop);

  const auto ns = LaurentLoop::nodes(r, 2 * order + 1);
  std::vector<Matrix2C> conj_samples(ns.size());
  for (std::size_t m = 0; m < ns.size(); ++m) {
    const Matrix2C mv = fac.minus.eval(ns[m]);
    conj_samples[m] = mv * xi.eval(ns[m]) * mv.inverse();
  }
  const LaurentLoop conj = LaurentLoop::from_samples(r, conj_samples);

  const double scale = std::max(1.0, conj.max_scaled_norm());
  double outside = 0.0;
  for (int j = -order; j <= order; ++j)
    if (j < -g || j > 1) outside = std::max(outside, conj.scaled_norm(j));
  if (outside > 1e-8 * scale)
    throw std::runtime_error(
        "isospectral_action: conjugated potential has residual " +
        sci(outside) + " outside degrees -g..1");

  // Validate against the potential invariants, then snap exactly.
  std::vector<Matrix2C> cs(g + 2);
  for (int j = -g; j <= 1; ++j) {
    const Matrix2C raw = conj.coefficient(j);
    const auto [part, remainder] = su2_project(raw);
    if (remainder > 1e-7)
      throw std::runtime_error(
          "isospectral_action: output coefficient xi_" + std::to_string(j) +
          " fails su(2) by " + sci(remainder));
    cs[j + g] = part;
  }
  const Matrix2C top = 0.5 * sigma3();
  if (distance(cs.back(), top) > 1e-7)
    throw std::runtime_error(
        "isospectral_action: output xi_1 deviates from (1/2) sigma_3 by " +
        sci(distance(cs.back(), top)));
  cs.back() = top;
  const double diag = su2_inner(cs[g], sigma3());
  if (std::abs(diag) > 1e-7)
    throw std::runtime_error(
        "isospectral_action: output xi_0 fails orthogonality to sigma_3 by " +
        sci(std::abs(diag)));
  cs[g] -= diag * sigma3();
  return FiniteTypePotential::make(g, std::move(cs));
}

/// Samples h_{L,alpha} F_lambda(t) on C_r, Birkhoff-factorizes, and returns
/// the maximum node deviation between the plus factor and the closed-form
/// dressed frame, after aligning the unobservable overall sign at one node.
inline double dressing_oracle_compare(
    const std::function<Matrix2C(Complex)>& frame_at_t,
    const SimpleFactorSpec& s, double r, int order) {
  if (!(std::abs(s.alpha) < r))
    throw std::invalid_argument(
        "dressing_oracle_compare: |alpha| must be below the contour radius");
  const auto ns = LaurentLoop::nodes(r, 2 * order + 1);
  std::vector<Matrix2C> frame_samples(ns.size()), product(ns.size());
  for (std::size_t m = 0; m < ns.size(); ++m) {
    frame_samples[m] = frame_at_t(ns[m]);
    product[m] = simple_factor_eval(s, ns[m]) * frame_samples[m];
  }
  const LaurentLoop loop = LaurentLoop::from_samples(r, product);
  const BirkhoffFactors fac = birkhoff_factorize(loop);

  const Matrix2C a = s.involution();
  const ProjectiveLine lp = transported_line(frame_at_t(s.alpha), s.line);
  const Matrix2C a_prime =
      hermitian_projector(lp.orthogonal()) - hermitian_projector(lp);

  double sign = 1.0;
  {
    const Matrix2C p0 = fac.plus.eval(ns[0]);
    const Matrix2C c0 =
        dressed_value(frame_samples[0], ns[0], s.alpha, a, a_prime);
    if (distance(p0, -c0) < distance(p0, c0)) sign = -1.0;
  }
  double worst = 0.0;
  for (std::size_t m = 0; m < ns.size(); ++m) {
    const Matrix2C closed =
        dressed_value(frame_samples[m], ns[m], s.alpha, a, a_prime);
    worst = std::max(worst, distance(fac.plus.eval(ns[m]), sign * closed));
  }
  return worst;
}

}  // namespace circleton
