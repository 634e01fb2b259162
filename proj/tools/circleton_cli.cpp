// Command-line front end: synthesize, verify, enumerate and export
// circletons, plus the Birkhoff-factorization oracle self-tests.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "circleton/birkhoff.hpp"
#include "circleton/circletons.hpp"
#include "circleton/io.hpp"

namespace {

using namespace circleton;

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_bad_flags = 2;
constexpr int exit_closure = 3;

ExportFormat parse_format(const std::string& f) {
  if (f == "csv") return ExportFormat::csv;
  if (f == "json") return ExportFormat::json;
  if (f == "obj") return ExportFormat::obj;
  throw CLI::ValidationError("--format must be csv, json or obj");
}

struct SpecFlags {
  int omega = 0;
  int k = 0;
  std::vector<int> ks;

  CircletonSpec resolve() const {
    CircletonSpec spec;
    spec.omega = omega;
    if (k != 0 && !ks.empty())
      throw std::invalid_argument("--k and --ks are mutually exclusive");
    if (k != 0)
      spec.ks = {k};
    else
      spec.ks = ks;
    if (!spec.ks.empty() && omega < 2)
      throw std::invalid_argument(
          "omega-wrapped circles admit precisely omega - 1 many simple "
          "factors; omega = " +
          std::to_string(omega) + " leaves none");
    spec.validate();
    return spec;
  }
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("--omega", f.omega, "wrapping number of the base circle")
      ->required();
  auto* ko = cmd->add_option("--k", f.k, "single resonance index")
                 ->check(CLI::PositiveNumber);
  cmd->add_option("--ks", f.ks, "comma-separated resonance indices")
      ->delimiter(',')
      ->excludes(ko);
}

int run_gen(const SpecFlags& flags, int samples, const std::string& format,
            const std::string& out, double closure_tol) {
  CircletonSpec spec;
  try {
    spec = flags.resolve();
    if (samples < 256)
      throw std::invalid_argument("gen: need --samples >= 256");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_flags;
  }

  const CurveSamples curve = make_circleton(spec, samples);
  if (!(curve.meta.closure_error < closure_tol)) {
    std::cerr << "error: closure error " << curve.meta.closure_error
              << " exceeds tolerance " << closure_tol << "\n";
    return exit_closure;
  }
  write_curve({parse_format(format), out, curve});

  std::printf(
      "%s-circleton: omega=%d closure_error=%.3e bending_energy=%.10g "
      "peaks=%d -> %s\n",
      spec.label().c_str(), spec.omega, curve.meta.closure_error,
      curve.meta.bending_energy, curve.meta.peak_count, out.c_str());
  return exit_ok;
}

struct CheckRow {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

/// Full invariant suite for one spec: closure, energy, curvature bounds,
/// peak count, residue cancellation and the Birkhoff-oracle comparison.
int run_verify(const SpecFlags& flags, double tol) {
  CircletonSpec spec;
  try {
    spec = flags.resolve();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_flags;
  }

  const int samples = std::max(4096, 2048 * spec.omega);
  const CurveSamples curve = make_circleton(spec, samples);
  const double period = 2.0 * std::numbers::pi * spec.omega;
  std::vector<CheckRow> rows;

  rows.push_back({"closure", curve.meta.closure_error, tol,
                  curve.meta.closure_error < tol});

  const double energy_rel =
      std::abs(curve.meta.bending_energy - period) / period;
  rows.push_back({"bending_energy", energy_rel, 1e-6, energy_rel < 1e-6});

  if (spec.ks.size() == 1) {
    const int k = spec.ks[0];
    double low = 1e300, high = -1e300, formula_dev = 0.0;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
      low = std::min(low, curve.kappa[i]);
      high = std::max(high, curve.kappa[i]);
      formula_dev = std::max(
          formula_dev, std::abs(std::abs(circleton_curvature(
                                    k, spec.omega, curve.t[i])) -
                                std::abs(curve.kappa[i])));
    }
    const bool bounds = low > -1.0 && high < 3.0;
    rows.push_back({"curvature_bounds", std::max(-low, high), 3.0, bounds});
    rows.push_back({"curvature_formula", formula_dev, 1e-6,
                    formula_dev < 1e-6});
    rows.push_back({"peak_count", double(curve.meta.peak_count), double(k),
                    curve.meta.peak_count == k});
  }

  // Residue cancellation of the dressed family at each alpha, and the
  // factorization oracle against the closed-form dressing. The comparison
  // is absolute, so the probe times stay moderate: frame magnitudes on the
  // contour grow like e^t and push the attainable accuracy with them.
  double residue_worst = 0.0, oracle_worst = 0.0;
  {
    const auto resonances = resonance_points(spec.omega);
    for (double t : {1.0, 2.5, 5.5}) {
      std::function<Matrix2C(Complex)> eval = [t](Complex l) {
        return circle_frame(1.0, l, t);
      };
      for (int k : spec.ks) {
        const Complex alpha = resonances[k - 1].alpha;
        const SimpleFactorSpec s{ProjectiveLine::basis0(), alpha};
        oracle_worst = std::max(
            oracle_worst, dressing_oracle_compare(eval, s, 2.0, 64));
        eval = dressed_evaluator(eval, s, eval(alpha));
        residue_worst = std::max(
            residue_worst,
            residue_estimate(eval, alpha, 0.05, 64).norm());
        residue_worst = std::max(
            residue_worst,
            residue_estimate(eval, -alpha, 0.05, 64).norm());
      }
    }
  }
  rows.push_back({"residue_cancellation", residue_worst, 1e-8,
                  residue_worst < 1e-8});
  rows.push_back({"oracle_dressing", oracle_worst, 1e-6, oracle_worst < 1e-6});

  bool all = true;
  std::printf("verify %s-circleton (samples=%d)\n", spec.label().c_str(),
              samples);
  for (const auto& r : rows) {
    std::printf("  [%s] %-22s value=%.3e threshold=%.3e\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value,
                r.threshold);
    all = all && r.pass;
  }
  return all ? exit_ok : exit_check_failed;
}

int run_enumerate(int omega, int size, bool size_given) {
  if (omega < 1) {
    std::cerr << "error: --omega must be >= 1\n";
    return exit_bad_flags;
  }
  if (size_given) {
    if (size < 0 || size > omega - 1) {
      std::cerr << "error: --size must lie in [0, omega-1]\n";
      return exit_bad_flags;
    }
    for (const auto& s : enumerate_multicircletons(omega, size))
      std::printf("%s\n", s.label().c_str());
    return exit_ok;
  }
  for (int k = 0; k <= omega - 1; ++k) {
    const auto specs = enumerate_multicircletons(omega, k);
    std::printf("# size %d: %zu spec%s\n", k, specs.size(),
                specs.size() == 1 ? "" : "s");
    for (const auto& s : specs) std::printf("%s\n", s.label().c_str());
  }
  return exit_ok;
}

int run_curvature(int omega, int k, int samples, const std::string& out) {
  if (omega < 2 || k < 1 || k >= omega || samples < 2) {
    std::cerr << "error: need omega >= 2, 1 <= k < omega, samples >= 2\n";
    return exit_bad_flags;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open " << out << "\n";
    return exit_bad_flags;
  }
  const double period = 2.0 * std::numbers::pi * omega;
  for (int i = 0; i < samples; ++i) {
    const double t = period * i / samples;
    f << format17(t) << ' ' << format17(circleton_curvature(k, omega, t))
      << '\n';
  }
  std::printf("(%d;%d) curvature: %d samples over [0, %.10g] -> %s\n", k,
              omega, samples, period, out.c_str());
  return exit_ok;
}

Matrix2C random_su2_element(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  return su2_embed({n(rng), n(rng), n(rng)});
}

/// Seeded big-cell loops: exp of a random minus polynomial times exp of a
/// random plus polynomial, both trace-free, so each factor is exactly
/// unimodular and exactly normalized.
LaurentLoop random_big_cell_loop(std::mt19937_64& rng, double r, int order) {
  constexpr int degree = 6;
  std::vector<Matrix2C> minus_c(degree), plus_c(degree + 1);
  for (int j = 1; j <= degree; ++j)
    minus_c[j - 1] = random_su2_element(rng, 0.35 * std::pow(2.0, -j));
  for (int j = 0; j <= degree; ++j)
    plus_c[j] = random_su2_element(rng, 0.35 * std::pow(2.0, -j) *
                                            std::pow(r, -j));
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

int run_oracle_selftest(double r, int order, unsigned seed) {
  std::mt19937_64 rng(seed);
  double recomposition = 0.0, uniqueness = 0.0;
  bool reality_ok = true;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    const LaurentLoop g = random_big_cell_loop(rng, r, order);
    const BirkhoffFactors fac = birkhoff_factorize(g);
    recomposition = std::max(recomposition, fac.residual);
    // Re-factorizing the recomposition must return the same pair.
    const auto ns = LaurentLoop::nodes(r, 2 * order + 1);
    std::vector<Matrix2C> prod(ns.size());
    for (std::size_t m = 0; m < ns.size(); ++m)
      prod[m] = fac.plus.eval(ns[m]) * fac.minus.eval(ns[m]);
    const BirkhoffFactors again =
        birkhoff_factorize(LaurentLoop::from_samples(r, prod));
    for (std::size_t m = 0; m < ns.size(); ++m) {
      uniqueness = std::max(uniqueness, distance(again.plus.eval(ns[m]),
                                                 fac.plus.eval(ns[m])));
      uniqueness = std::max(uniqueness, distance(again.minus.eval(ns[m]),
                                                 fac.minus.eval(ns[m])));
    }
    if (reality_check(g) &&
        (!reality_check(fac.plus) || !reality_check(fac.minus)))
      reality_ok = false;
  }

  double dressing_dev = 0.0;
  {
    const Complex alpha = resonance_points(2)[0].alpha;
    const SimpleFactorSpec s{ProjectiveLine::basis0(), alpha};
    for (double t : {0.5, 1.0, 2.5, 5.0}) {
      auto eval = [t](Complex l) { return circle_frame(1.0, l, t); };
      dressing_dev = std::max(dressing_dev,
                              dressing_oracle_compare(eval, s, r, order));
    }
  }

  const bool pass = recomposition < 1e-8 && uniqueness < 1e-8 &&
                    reality_ok && dressing_dev < 1e-6;
  std::printf("oracle selftest: seed=%u loops=%d radius=%g modes=%d\n", seed,
              trials, r, order);
  std::printf("  [%s] max recomposition residual %.3e (tol 1e-8)\n",
              recomposition < 1e-8 ? "PASS" : "FAIL", recomposition);
  std::printf("  [%s] max refactorization deviation %.3e (tol 1e-8)\n",
              uniqueness < 1e-8 ? "PASS" : "FAIL", uniqueness);
  std::printf("  [%s] reality propagation to both factors\n",
              reality_ok ? "PASS" : "FAIL");
  std::printf("  [%s] dressing vs closed form %.3e (tol 1e-6)\n",
              dressing_dev < 1e-6 ? "PASS" : "FAIL", dressing_dev);
  return pass ? exit_ok : exit_check_failed;
}

int run_oracle_potential(const std::string& file, double tmax, int samples,
                         double r /* 0 = auto */, int order,
                         const std::string& format,
                         const std::string& out) {
  FiniteTypePotential xi = FiniteTypePotential::genus0(0, 0);
  try {
    xi = load_potential_json(file);
  } catch (const PotentialError& e) {
    std::cerr << "error: invalid potential: " << e.what() << "\n";
    return exit_bad_flags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_flags;
  }
  if (r == 0.0)  // auto: clear the branch points with a factor-2 margin
    r = 2.0 * std::max(1.0, detail::branch_radius(xi));
  if (!(tmax > 0.0) || samples < 8 || !(r > 0.0) || order < 8) {
    std::cerr
        << "error: need --tmax > 0, --samples >= 8, --radius > 0, "
           "--modes >= 8\n";
    return exit_bad_flags;
  }

  // Assemble a frame family from the plus factors: F0(t) and the
  // lambda-derivative at 0 are the first two Cauchy coefficients.
  FrameFamily fam;
  fam.step = tmax / samples;
  fam.period = tmax;
  fam.times.resize(samples + 1);
  fam.frame0.resize(samples + 1);
  fam.deriv0.resize(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    fam.times[i] = fam.step * i;
    const SymesResult sr = symes_map(xi, fam.times[i], r, order);
    auto plus_eval = [&](Complex l) { return sr.plus.eval(l); };
    fam.frame0[i] = cauchy_coefficient(plus_eval, r, 0, 2 * order + 1);
    fam.deriv0[i] = cauchy_coefficient(plus_eval, r, 1, 2 * order + 1);
  }
  CurveSamples curve = frame_curve(fam, "symes:" + file);
  curve.meta.bending_energy =
      bending_energy_of(curve.kappa, curve.step, nullptr);
  write_curve({parse_format(format), out, curve});
  std::printf(
      "symes curve: g=%d tmax=%.10g samples=%d closure_error=%.3e -> %s\n",
      xi.genus(), tmax, samples, curve.meta.closure_error, out.c_str());
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circleton: loop-group toolkit for dressed circles"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "synthesize a circleton and export");
  SpecFlags gen_spec;
  int gen_samples = 4096;
  std::string gen_format = "csv", gen_out;
  double gen_closure_tol = 1e-7;
  add_spec_flags(gen, gen_spec);
  gen->add_option("--samples", gen_samples, "grid samples over one period");
  gen->add_option("--format", gen_format, "csv|json|obj")
      ->check(CLI::IsMember({"csv", "json", "obj"}));
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_option("--closure-tol", gen_closure_tol,
                  "closure-error gate (exit 3 when exceeded)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  SpecFlags verify_spec;
  double verify_tol = 1e-7;
  add_spec_flags(verify, verify_spec);
  verify->add_option("--tol", verify_tol, "closure tolerance");

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "list multi-circletons");
  int enum_omega = 0, enum_size = 0;
  enumerate->add_option("--omega", enum_omega, "wrapping number")->required();
  auto* size_opt = enumerate->add_option("--size", enum_size,
                                         "number of simple factors");

  // curvature
  auto* curvature =
      app.add_subcommand("curvature", "closed-form curvature samples");
  int curv_omega = 0, curv_k = 0, curv_samples = 4096;
  std::string curv_out;
  curvature->add_option("--omega", curv_omega, "wrapping number")->required();
  curvature->add_option("--k", curv_k, "resonance index")->required();
  curvature->add_option("--samples", curv_samples, "sample count");
  curvature->add_option("--out", curv_out, "output path")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Birkhoff factorization oracle");
  bool selftest = false;
  std::string potential_file, oracle_out = "oracle_curve.csv",
              oracle_format = "csv";
  double oracle_tmax = 2.0 * std::numbers::pi;
  double oracle_radius = 2.0;  // selftest contour; 0 = auto in potential mode
  int oracle_samples = 512, oracle_modes = 64;
  unsigned oracle_seed = 0;
  oracle->add_flag("--selftest", selftest, "seeded factorization round-trips");
  oracle->add_option("--potential", potential_file, "potential JSON file");
  oracle->add_option("--tmax", oracle_tmax, "arc-length horizon");
  oracle->add_option("--samples", oracle_samples, "curve samples");
  auto* radius_opt =
      oracle->add_option("--radius", oracle_radius, "contour radius");
  oracle->add_option("--modes", oracle_modes, "Laurent truncation order");
  oracle->add_option("--seed", oracle_seed, "selftest RNG seed");
  oracle->add_option("--out", oracle_out, "output path (potential mode)");
  oracle->add_option("--format", oracle_format, "csv|json|obj")
      ->check(CLI::IsMember({"csv", "json", "obj"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return exit_bad_flags;
  }

  try {
    if (gen->parsed())
      return run_gen(gen_spec, gen_samples, gen_format, gen_out,
                     gen_closure_tol);
    if (verify->parsed()) return run_verify(verify_spec, verify_tol);
    if (enumerate->parsed())
      return run_enumerate(enum_omega, enum_size, size_opt->count() > 0);
    if (curvature->parsed())
      return run_curvature(curv_omega, curv_k, curv_samples, curv_out);
    if (oracle->parsed()) {
      if (selftest && potential_file.empty())
        return run_oracle_selftest(oracle_radius, oracle_modes, oracle_seed);
      if (!selftest && !potential_file.empty()) {
        const double r = radius_opt->count() > 0 ? oracle_radius : 0.0;
        return run_oracle_potential(potential_file, oracle_tmax,
                                    oracle_samples, r, oracle_modes,
                                    oracle_format, oracle_out);
      }
      std::cerr
          << "error: oracle needs exactly one of --selftest or --potential\n";
      return exit_bad_flags;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_flags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_check_failed;
  }
  return exit_bad_flags;
}
