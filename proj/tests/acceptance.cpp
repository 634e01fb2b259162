// Acceptance suite: one quantitative criterion per check, each printed as a
// single pass/fail line with its measured value and threshold.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "circleton/birkhoff.hpp"
#include "circleton/circletons.hpp"
#include "circleton/dressing.hpp"
#include "circleton/frames.hpp"
#include "circleton/io.hpp"

using namespace circleton;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int number, const std::string& name,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("[%s] criterion %2d: %s — %s (%.2f s)\n",
              o.pass ? "PASS" : "FAIL", number, name.c_str(),
              o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

Matrix2C random_su2_element(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  return su2_embed({n(rng), n(rng), n(rng)});
}

LaurentLoop random_big_cell_loop(std::mt19937_64& rng, double r, int order) {
  constexpr int degree = 6;
  std::vector<Matrix2C> minus_c(degree), plus_c(degree + 1);
  for (int j = 1; j <= degree; ++j)
    minus_c[j - 1] = random_su2_element(rng, 0.35 * std::pow(2.0, -j));
  for (int j = 0; j <= degree; ++j)
    plus_c[j] =
        random_su2_element(rng, 0.35 * std::pow(2.0, -j) * std::pow(r, -j));
  const auto ns = LaurentLoop::nodes(r, 2 * order + 1);
  std::vector<Matrix2C> samples(ns.size());
  for (std::size_t m = 0; m < ns.size(); ++m) {
    Matrix2C mpoly = Matrix2C::zero(), ppoly = Matrix2C::zero();
    Complex neg = 1.0, pos = 1.0;
    for (int j = 1; j <= degree; ++j) {
      neg /= ns[m];
      mpoly += minus_c[j - 1] * neg;
    }
    for (int j = 0; j <= degree; ++j) {
      ppoly += plus_c[j] * pos;
      pos *= ns[m];
    }
    samples[m] = expm_tracefree(mpoly) * expm_tracefree(ppoly);
  }
  return LaurentLoop::from_samples(r, samples);
}

std::string fmt(double v) { return sci(v); }

}  // namespace

int main() {
  std::printf("circleton acceptance suite\n");

  criterion(1, "closure of all circletons with omega <= 5", [] {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int curves = 0;
    for (int omega = 1; omega <= 5; ++omega) {
      for (int size = 0; size < omega; ++size) {
        for (const auto& spec : enumerate_multicircletons(omega, size)) {
          const auto curve = make_circleton(spec, 4096 * omega);
          worst = std::max(worst, curve.meta.closure_error);
          ++curves;
        }
      }
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    // all subsets for every omega <= 5: 31 curves, a superset of the
    // fifteen nonempty omega = 5 specs
    const bool pass = worst < 1e-7 && curves == 31 && seconds < 10.0;
    return Outcome{pass, std::to_string(curves) +
                             " curves, worst closure " + fmt(worst) +
                             " (tol 1e-7)"};
  });

  criterion(2, "bending energy 2 pi omega for singles, omega <= 6", [] {
    double worst = 0.0;
    for (int omega = 2; omega <= 6; ++omega) {
      for (int k = 1; k < omega; ++k) {
        const auto curve = make_circleton({omega, {k}}, 4096 * omega);
        const double expected = 2 * pi * omega;
        worst = std::max(worst, std::abs(curve.meta.bending_energy -
                                         expected) /
                                    expected);
      }
    }
    return Outcome{worst < 1e-6,
                   "worst relative error " + fmt(worst) + " (tol 1e-6)"};
  });

  criterion(3, "curvature of singles strictly inside (-1, 3)", [] {
    double low = 1e300, high = -1e300;
    for (int omega = 2; omega <= 6; ++omega) {
      for (int k = 1; k < omega; ++k) {
        const auto curve = make_circleton({omega, {k}}, 4096 * omega);
        for (double v : curve.kappa) {
          low = std::min(low, v);
          high = std::max(high, v);
        }
      }
    }
    // strictness at sampling resolution
    return Outcome{low > -1.0 + 1e-9 && high < 3.0 - 1e-9,
                   "sampled range [" + fmt(low) + ", " + fmt(high) + "]"};
  });

  criterion(4, "peak count equals k for all (k, omega), omega <= 6", [] {
    int bad = 0;
    for (int omega = 2; omega <= 6; ++omega)
      for (int k = 1; k < omega; ++k)
        if (make_circleton({omega, {k}}, 8192).meta.peak_count != k) ++bad;
    return Outcome{bad == 0, bad == 0 ? "all 15 counts correct"
                                      : std::to_string(bad) + " mismatches"};
  });

  criterion(5, "resonance census: omega - 1 points, none for omega = 1", [] {
    bool ok = resonance_points(1).empty();
    for (int omega = 1; omega <= 12; ++omega)
      ok = ok && resonance_points(omega).size() ==
                     static_cast<std::size_t>(omega - 1);
    return Outcome{ok, "omega = 1..12 exhaustive"};
  });

  criterion(6, "circle monodromy (M0, M0') = (-I, 0), closed form and ODE",
            [] {
    const Matrix2C closed_m = circle_frame(1.0, 0.0, 2 * pi);
    const Matrix2C closed_d =
        circle_frame_lambda_derivative(1.0, 0.0, 2 * pi);
    const auto ode = integrate_frame(ComplexCurvatureSignal::constant(1, 0),
                                     2 * pi, 4096);
    const auto [ode_m, ode_d] = monodromy(ode, 2 * pi);
    const double worst = std::max(
        std::max(distance(closed_m, -Matrix2C::identity()), closed_d.norm()),
        std::max(distance(ode_m, -Matrix2C::identity()), ode_d.norm()));
    return Outcome{worst < 1e-8,
                   "worst deviation " + fmt(worst) + " (tol 1e-8)"};
  });

  criterion(7, "dressing vs Birkhoff oracle on the (1,2)-circleton", [] {
    const auto start = std::chrono::steady_clock::now();
    const SimpleFactorSpec s{ProjectiveLine::basis0(),
                             resonance_points(2)[0].alpha};
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double t = 0.5 + i;
      auto frame = [t](Complex l) { return circle_frame(1.0, l, t); };
      worst = std::max(worst, dressing_oracle_compare(frame, s, 2.0, 64));
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return Outcome{worst < 1e-6 && seconds < 5.0,
                   "worst deviation " + fmt(worst) + " (tol 1e-6), " +
                       fmt(seconds) + " s (< 5)"};
  });

  criterion(8, "residue cancellation of the dressed (1,2)-family", [] {
    const SimpleFactorSpec s{ProjectiveLine::basis0(),
                             resonance_points(2)[0].alpha};
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double t = 4 * pi * i / 16.0;
      auto base = [t](Complex l) { return circle_frame(1.0, l, t); };
      const auto ev = dressed_evaluator(base, s, base(s.alpha));
      worst = std::max(worst, residue_estimate(ev, s.alpha, 0.05, 64).norm());
      worst =
          std::max(worst, residue_estimate(ev, -s.alpha, 0.05, 64).norm());
    }
    return Outcome{worst < 1e-8,
                   "worst residue norm " + fmt(worst) + " (tol 1e-8)"};
  });

  criterion(9, "Symes map reproduces the genus-0 circles pointwise", [] {
    double worst = 0.0;
    for (auto [u, v] : {std::pair{1.0, 0.0}, std::pair{0.3, 0.4}}) {
      const auto xi = FiniteTypePotential::genus0(u, v);
      const double rho = std::hypot(u, v);
      for (int i = 0; i < 512; ++i) {
        const double t = 2 * pi * i / 512.0;
        const auto res = symes_map(xi, t, 2.0, 64);
        const double sn = std::sin(t * rho), s2 = std::sin(t * rho / 2);
        const Su2Vector reference{sn / rho, 2 * v * s2 * s2 / (rho * rho),
                                  -2 * u * s2 * s2 / (rho * rho)};
        worst = std::max(worst, distance(res.point, reference));
      }
    }
    return Outcome{worst < 1e-7,
                   "worst pointwise deviation " + fmt(worst) +
                       " (tol 1e-7, 512 samples each)"};
  });

  criterion(10, "Symes equivariance for a diagonal simple factor", [] {
    const auto xi = FiniteTypePotential::genus0(0.8, 0.3);
    const SimpleFactorSpec s{ProjectiveLine::basis0(),
                             resonance_points(2)[0].alpha};
    const double r = 2.0;
    const int order = 64;
    const auto ns = LaurentLoop::nodes(r, 2 * order + 1);
    double worst = 0.0;
    for (double t : {0.9, 1.7, 3.1}) {
      std::vector<Matrix2C> lhs_s(ns.size()), exp_s(ns.size());
      for (std::size_t m = 0; m < ns.size(); ++m) {
        const Matrix2C h = simple_factor_eval(s, ns[m]);
        const Matrix2C e = expm_tracefree(t * xi.eval(ns[m]));
        lhs_s[m] = h * e * h.inverse();
        exp_s[m] = e;
      }
      const auto lhs =
          birkhoff_factorize(LaurentLoop::from_samples(r, lhs_s));
      const auto phi =
          birkhoff_factorize(LaurentLoop::from_samples(r, exp_s));
      std::vector<Matrix2C> rhs_s(ns.size());
      for (std::size_t m = 0; m < ns.size(); ++m)
        rhs_s[m] = simple_factor_eval(s, ns[m]) * phi.plus.eval(ns[m]);
      const auto rhs =
          birkhoff_factorize(LaurentLoop::from_samples(r, rhs_s));
      double dev = 0.0, dev_flipped = 0.0;
      for (std::size_t m = 0; m < ns.size(); ++m) {
        const Matrix2C l = lhs.plus.eval(ns[m]);
        const Matrix2C rr = rhs.plus.eval(ns[m]);
        dev = std::max(dev, distance(l, rr));
        dev_flipped = std::max(dev_flipped, distance(l, -rr));
      }
      worst = std::max(worst, std::min(dev, dev_flipped));
    }
    return Outcome{worst < 1e-6,
                   "worst sign-aligned deviation " + fmt(worst) +
                       " (tol 1e-6)"};
  });

  criterion(11, "isospectral action preserves det xi and commutes", [] {
    std::mt19937_64 rng(5);
    double det_dev = 0.0, comm_dev = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix2C xi_m1 = random_su2_element(rng, 0.4);
      Matrix2C xi_0 = random_su2_element(rng, 0.4);
      xi_0 -= su2_inner(xi_0, sigma3()) * sigma3();
      const auto xi =
          FiniteTypePotential::make(1, {xi_m1, xi_0, 0.5 * sigma3()});
      const auto sd = spectral_det(xi);

      const auto moved =
          isospectral_action(std::vector<double>{0.4}, xi, 2.0, 64);
      const auto sd_moved = spectral_det(moved);
      for (std::size_t i = 0; i < sd.a.size(); ++i)
        det_dev = std::max(det_dev, std::abs(sd.a[i] - sd_moved.a[i]));

      const auto two = isospectral_action(std::vector<double>{0.25}, moved,
                                          2.0, 64);
      const auto one =
          isospectral_action(std::vector<double>{0.65}, xi, 2.0, 64);
      for (int j = -1; j <= 1; ++j)
        comm_dev = std::max(comm_dev, distance(two.coefficient(j),
                                               one.coefficient(j)));
    }
    return Outcome{det_dev < 1e-8 && comm_dev < 1e-7,
                   "det deviation " + fmt(det_dev) +
                       " (tol 1e-8), flow-composition deviation " +
                       fmt(comm_dev) + " (tol 1e-7)"};
  });

  criterion(12, "enumeration counts C(omega-1, k), labels of (.,.;5)", [] {
    bool ok = true;
    for (int omega = 1; omega <= 8; ++omega)
      for (int size = 0; size < omega; ++size)
        ok = ok && enumerate_multicircletons(omega, size).size() ==
                       binomial(omega - 1, size);
    const auto six = enumerate_multicircletons(5, 2);
    const std::vector<std::string> labels{"(1,2;5)", "(1,3;5)", "(1,4;5)",
                                          "(2,3;5)", "(2,4;5)", "(3,4;5)"};
    ok = ok && six.size() == labels.size();
    for (std::size_t i = 0; ok && i < six.size(); ++i)
      ok = six[i].label() == labels[i];
    return Outcome{ok, "omega <= 8 exhaustive, six double-circleton labels"};
  });

  criterion(13, "double dressing commutes for all pairs, omega <= 5", [] {
    double worst = 0.0;
    for (int omega = 3; omega <= 5; ++omega) {
      const auto rs = resonance_points(omega);
      for (int k1 = 1; k1 < omega; ++k1) {
        for (int k2 = k1 + 1; k2 < omega; ++k2) {
          const double period = 2 * pi * omega;
          const auto fam = circle_frame_family(
              1.0, period, 2048 * omega,
              {rs[k1 - 1].alpha, rs[k2 - 1].alpha});
          const SimpleFactorSpec s1{ProjectiveLine::basis0(),
                                    rs[k1 - 1].alpha};
          const SimpleFactorSpec s2{ProjectiveLine::basis0(),
                                    rs[k2 - 1].alpha};
          const auto ab = dress_frame(dress_frame(fam, s1), s2);
          const auto ba = dress_frame(dress_frame(fam, s2), s1);
          const auto ca = frame_curve(ab.family);
          const auto cb = frame_curve(ba.family);
          for (std::size_t i = 0; i < ca.points.size(); ++i)
            worst = std::max(worst, distance(ca.points[i], cb.points[i]));
        }
      }
    }
    return Outcome{worst < 1e-7,
                   "10 pairs, worst curve deviation " + fmt(worst) +
                       " (tol 1e-7)"};
  });

  criterion(14, "property floor: invariants and 100 seeded loops", [] {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);

    // unitarity / determinant of an integrated frame
    const auto fam = integrate_frame(ComplexCurvatureSignal::constant(1, 0),
                                     2 * pi, 4096, {Complex(0.8)});
    double frame_dev = frame_family_defect(fam);
    for (const auto& f : *fam.samples_at(Complex(0.8))) {
      frame_dev = std::max(frame_dev, std::abs(f.det() - 1.0));
      frame_dev = std::max(
          frame_dev, distance(f * f.adjoint(), Matrix2C::identity()));
    }
    bool ok = frame_dev < 1e-7;

    // projector algebra
    for (int i = 0; i < 100; ++i) {
      const ProjectiveLine l(Complex(n(rng), n(rng)),
                             Complex(n(rng), n(rng)));
      const Matrix2C p = hermitian_projector(l);
      const Matrix2C q = hermitian_projector(l.orthogonal());
      ok = ok && distance(p * p, p) < 1e-12 &&
           distance(p + q, Matrix2C::identity()) < 1e-12;
    }

    // exponential inverse law
    for (int i = 0; i < 100; ++i) {
      const Matrix2C m = random_su2_element(rng, 1.0);
      ok = ok && distance(expm_tracefree(m) * expm_tracefree(-m),
                          Matrix2C::identity()) < 1e-10;
    }

    // Birkhoff recomposition on 100 seeded big-cell loops
    double worst_residual = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto fac =
          birkhoff_factorize(random_big_cell_loop(rng, 2.0, 24));
      worst_residual = std::max(worst_residual, fac.residual);
    }
    ok = ok && worst_residual < 1e-8;

    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return Outcome{ok && seconds < 30.0,
                   "frame defect " + fmt(frame_dev) +
                       ", worst loop residual " + fmt(worst_residual) +
                       ", " + fmt(seconds) + " s (< 30)"};
  });

  if (failures == 0)
    std::printf("all 14 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
