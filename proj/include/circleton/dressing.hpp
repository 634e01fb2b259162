/// Simple factors h_{L,alpha}, line transport, closed-form dressing of
/// frame families by the pole-free product formula, monodromy conjugation
/// and contour residue estimates.
#pragma once

#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include "circleton/frames.hpp"

namespace circleton {

/// A projective line L and a singularity alpha off the real axis define the
/// simple factor h_{L,alpha}.
struct SimpleFactorSpec {
  ProjectiveLine line;
  Complex alpha;

  SimpleFactorSpec(ProjectiveLine l, Complex a) : line(l), alpha(a) {
    if (std::abs(a.imag()) == 0.0)
      throw std::invalid_argument(
          "SimpleFactorSpec: singularity must lie off the real line");
  }

  /// pi_L^perp - pi_L, a hermitian involution with determinant -1.
  Matrix2C involution() const {
    return hermitian_projector(line.orthogonal()) - hermitian_projector(line);
  }
};

/// h_{L,alpha}(lambda) = (1 - alpha^2/lambda^2)^{-1/2}
///                        (I + alpha/lambda (pi_L^perp - pi_L)).
/// The scalar uses the principal square root of 1 - alpha^2/lambda^2, whose
/// cut is the segment [conj(alpha), alpha] for purely imaginary alpha; the
/// normalization gives h(infinity) = I.
inline Matrix2C simple_factor_eval(const SimpleFactorSpec& s, Complex lambda) {
  const Complex a = s.alpha;
  if (std::abs(lambda) < 1e-12 || std::abs(lambda - a) < 1e-12 ||
      std::abs(lambda + a) < 1e-12)
    throw std::invalid_argument(
        "simple_factor_eval: lambda at 0 or a singularity");
  const Complex scale = 1.0 / std::sqrt(1.0 - a * a / (lambda * lambda));
  return scale * (Matrix2C::identity() + (a / lambda) * s.involution());
}

inline Matrix2C simple_factor_inverse_eval(const SimpleFactorSpec& s,
                                           Complex lambda) {
  const Complex a = s.alpha;
  if (std::abs(lambda) < 1e-12 || std::abs(lambda - a) < 1e-12 ||
      std::abs(lambda + a) < 1e-12)
    throw std::invalid_argument(
        "simple_factor_inverse_eval: lambda at 0 or a singularity");
  const Complex scale = 1.0 / std::sqrt(1.0 - a * a / (lambda * lambda));
  return scale * (Matrix2C::identity() - (a / lambda) * s.involution());
}

/// L' = F_alpha^{-1} L.
inline ProjectiveLine transported_line(const Matrix2C& f_at_alpha,
                                       const ProjectiveLine& l) {
  if (std::abs(f_at_alpha.det() - 1.0) > 1e-8)
    throw std::invalid_argument("transported_line: det F differs from 1");
  return apply(f_at_alpha.inverse(), l);
}

/// Dressed frame value by the pole-free product form
///   (lambda I + alpha A) F (lambda I - alpha A') / (lambda^2 - alpha^2),
/// which combines the two scalar normalizations into the branch-free factor
/// lambda^2/(lambda^2 - alpha^2). Valid for lambda != +-alpha, including 0.
inline Matrix2C dressed_value(const Matrix2C& f, Complex lambda, Complex alpha,
                              const Matrix2C& a, const Matrix2C& a_prime) {
  const Complex den = lambda * lambda - alpha * alpha;
  if (std::abs(den) < 1e-14)
    throw std::invalid_argument("dressed_value: lambda at a singularity");
  const Matrix2C id = Matrix2C::identity();
  return ((lambda * id + alpha * a) * f * (lambda * id - alpha * a_prime)) /
         den;
}

/// lambda-derivative at 0 of the dressed frame, by the quotient rule:
///   A D A' + (1/alpha) (F0 A' - A F0).
inline Matrix2C dressed_deriv0(const Matrix2C& f0, const Matrix2C& d0,
                               Complex alpha, const Matrix2C& a,
                               const Matrix2C& a_prime) {
  return a * d0 * a_prime + (1.0 / alpha) * (f0 * a_prime - a * f0);
}

/// Same shape as FrameFamily plus provenance: the base family and the
/// ordered simple factors applied to it.
struct DressedFrameFamily {
  FrameFamily family;
  std::shared_ptr<const FrameFamily> base;
  std::vector<SimpleFactorSpec> applied;
};

/// Dresses a frame family by one simple factor. The family must carry
/// samples at lambda = alpha; they drive the transported line L'(t). Every
/// other stored lambda is mapped through the pole-free product form, and
/// the lambda = 0 pair by its analytic formulas.
inline DressedFrameFamily dress_frame(const FrameFamily& fam,
                                      const SimpleFactorSpec& s) {
  const auto* at_alpha = fam.samples_at(s.alpha);
  if (at_alpha == nullptr)
    throw std::invalid_argument(
        "dress_frame: family lacks samples at lambda = alpha; request them "
        "at integration time");

  const Matrix2C a = s.involution();
  const std::size_t n = fam.size();

  std::vector<Matrix2C> a_prime(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ProjectiveLine lp = transported_line((*at_alpha)[i], s.line);
    a_prime[i] =
        hermitian_projector(lp.orthogonal()) - hermitian_projector(lp);
  }

  DressedFrameFamily out;
  out.base = std::make_shared<FrameFamily>(fam);
  out.applied.push_back(s);
  FrameFamily& g = out.family;
  g.step = fam.step;
  g.times = fam.times;
  g.period = fam.period;
  g.frame0.resize(n);
  g.deriv0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.frame0[i] = a * fam.frame0[i] * a_prime[i];
    g.deriv0[i] = dressed_deriv0(fam.frame0[i], fam.deriv0[i], s.alpha, a,
                                 a_prime[i]);
  }
  for (const auto& [lambda, vals] : fam.extra) {
    if (std::abs(lambda * lambda - s.alpha * s.alpha) < 1e-10)
      continue;  // the factor's own singularities cannot be carried over
    std::vector<Matrix2C> dressed(n);
    for (std::size_t i = 0; i < n; ++i)
      dressed[i] = dressed_value(vals[i], lambda, s.alpha, a, a_prime[i]);
    g.extra.emplace_back(lambda, std::move(dressed));
  }

  if (const double defect = frame_family_defect(g); defect > 1e-8)
    throw std::runtime_error("dress_frame: frame family invariants violated "
                             "after dressing, defect " +
                             sci(defect));
  return out;
}

inline DressedFrameFamily dress_frame(const DressedFrameFamily& fam,
                                      const SimpleFactorSpec& s) {
  DressedFrameFamily out = dress_frame(fam.family, s);
  out.applied.insert(out.applied.begin(), fam.applied.begin(),
                     fam.applied.end());
  out.base = fam.base ? fam.base : out.base;
  return out;
}

/// lambda-evaluator of the dressed frame at one fixed t, composed from a
/// base evaluator and the base value at alpha. Composable across factors.
inline std::function<Matrix2C(Complex)> dressed_evaluator(
    std::function<Matrix2C(Complex)> base, const SimpleFactorSpec& s,
    const Matrix2C& base_at_alpha) {
  const Matrix2C a = s.involution();
  const ProjectiveLine lp = transported_line(base_at_alpha, s.line);
  const Matrix2C a_prime =
      hermitian_projector(lp.orthogonal()) - hermitian_projector(lp);
  return [base = std::move(base), alpha = s.alpha, a, a_prime](Complex l) {
    return dressed_value(base(l), l, alpha, a, a_prime);
  };
}

/// Monodromy conjugation h(lambda) M h(lambda)^{-1}. The eigenline
/// condition M_alpha^{-1} L = L (sine of angle below 1e-8) is required,
/// else dressing would break the periodicity the monodromy encodes.
/// Conjugation uses the scalar-free representative lambda I + alpha A, so
/// lambda = 0 is allowed.
inline Matrix2C dressed_monodromy(const Matrix2C& m_at_lambda,
                                  const Matrix2C& m_at_alpha,
                                  const SimpleFactorSpec& s, Complex lambda) {
  const ProjectiveLine back = apply(m_at_alpha.inverse(), s.line);
  if (projective_distance(back, s.line) > 1e-8)
    throw std::invalid_argument(
        "dressed_monodromy: L is not an eigenline of the monodromy at alpha; "
        "the dressed frame would not be periodic");
  const Matrix2C r =
      lambda * Matrix2C::identity() + s.alpha * s.involution();
  return r * m_at_lambda * r.inverse();
}

/// Transforms the closing pair (M_0, M'_0) of a rho-periodic family under
/// dressing: conjugation at lambda = 0 plus the quotient-rule derivative.
inline MonodromyPair dressed_monodromy_pair(const MonodromyPair& m,
                                            const Matrix2C& m_at_alpha,
                                            const SimpleFactorSpec& s) {
  const ProjectiveLine back = apply(m_at_alpha.inverse(), s.line);
  if (projective_distance(back, s.line) > 1e-8)
    throw std::invalid_argument(
        "dressed_monodromy_pair: L is not an eigenline of the monodromy at "
        "alpha");
  const Matrix2C a = s.involution();
  return {a * m.value * a,
          a * m.lambda_derivative * a +
              (1.0 / s.alpha) * (m.value * a - a * m.value)};
}

/// Eigenline structure of a unimodular matrix.
enum class EigenlineKind { TwoLines, OneLine, AllLines };

struct EigenlineResult {
  EigenlineKind kind;
  std::vector<ProjectiveLine> lines;  // 2, 1 or 0 entries
};

inline EigenlineResult find_eigenlines(const Matrix2C& m) {
  if (std::abs(m.det() - 1.0) > 1e-8)
    throw std::invalid_argument("find_eigenlines: det differs from 1");
  const Matrix2C id = Matrix2C::identity();
  if (distance(m, id) < 1e-8 || distance(m, -id) < 1e-8)
    return {EigenlineKind::AllLines, {}};

  auto kernel_line = [](const Matrix2C& k) {
    // k has rank 1; its kernel is spanned by (b, -a) or (d, -c).
    if (std::norm(k.a) + std::norm(k.b) >= std::norm(k.c) + std::norm(k.d))
      return ProjectiveLine(k.b, -k.a);
    return ProjectiveLine(k.d, -k.c);
  };

  const Complex tr = m.trace();
  const Complex disc = tr * tr - 4.0;  // char poly x^2 - tr x + 1
  if (std::abs(disc) < 1e-12) {
    return {EigenlineKind::OneLine, {kernel_line(m - (tr / 2.0) * id)}};
  }
  const Complex root = std::sqrt(disc);
  const Complex mu1 = 0.5 * (tr + root), mu2 = 0.5 * (tr - root);
  return {EigenlineKind::TwoLines,
          {kernel_line(m - mu1 * id), kernel_line(m - mu2 * id)}};
}

/// Trapezoidal contour estimate of (1/2 pi i) oint f(lambda) dlambda on the
/// circle |lambda - center| = radius. Exact for simple poles at the center.
inline Matrix2C residue_estimate(
    const std::function<Matrix2C(Complex)>& f, Complex center, double radius,
    int nodes) {
  if (nodes < 16) throw std::invalid_argument("residue_estimate: nodes < 16");
  if (!(radius > 0.0))
    throw std::invalid_argument("residue_estimate: radius <= 0");
  Matrix2C sum = Matrix2C::zero();
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes;
    const Complex e = std::exp(Complex(0, theta));
    sum += f(center + radius * e) * e;
  }
  return (radius / nodes) * sum;
}

}  // namespace circleton
