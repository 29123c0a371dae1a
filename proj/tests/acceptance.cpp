// Acceptance studies for the laboratory: each numbered criterion prints one
// pass/fail line; the process exits nonzero when any of them fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mcl/fv.hpp"
#include "mcl/geometry.hpp"
#include "mcl/lax_oracle.hpp"
#include "mcl/lorentzian.hpp"
#include "mcl/properties.hpp"
#include "mcl/scenario.hpp"
#include "mcl/viscous.hpp"

using namespace mcl;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", id,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void guarded(int id, const std::string& label, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, label, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

using Suite = std::map<std::string, RunResult>;

std::vector<fs::path> scenario_files() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(MCL_SCENARIO_DIR))
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

Suite run_suite(const fs::path& root) {
  fs::remove_all(root);
  Suite suite;
  for (const auto& file : scenario_files()) {
    const Scenario sc = parse_scenario_file(file);
    suite.emplace(sc.name, run_scenario(sc, root));
  }
  return suite;
}

std::vector<std::string> rel_files(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out.push_back(fs::relative(e.path(), root).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FluxFamily scaled_burgers_flux(const MetricChart& chart, const Vec& v, double a,
                               const std::string& name) {
  ScalarProfile p = make_profile("burgers");
  const auto val = p.value, der = p.deriv;
  p.value = [val, a](double u) { return a * val(u); };
  p.deriv = [der, a](double u) { return a * der(u); };
  return make_compatible_flux(chart, [v](const Vec&) { return v; }, p, name);
}

// ---- criterion 1: geometry core --------------------------------------------

void criterion1() {
  const std::string label = "divergence routes agree at order 2; duality closes";
  struct Probe {
    MetricChart chart;
    TangentField X;
    std::vector<Vec> pts;
  };
  std::vector<Probe> probes;
  {
    Probe p{make_chart("weighted_circle"),
            [](const Vec& x) {
              return Vec{0.4 + std::sin(2.0 * M_PI * x[0] + 0.3), 0.0};
            },
            {}};
    for (int i = 0; i < 12; ++i) p.pts.push_back({(i + 0.5) / 12.0, 0.0});
    probes.push_back(std::move(p));
  }
  {
    Probe p{make_chart("wavy_torus", {{"amp", 0.5}}),
            [](const Vec& x) {
              return Vec{std::sin(x[0] + 0.3) + 0.2, std::cos(x[1]) * std::sin(2.0 * x[0])};
            },
            {}};
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) p.pts.push_back({0.4 + 1.1 * i, 0.7 + 1.05 * j});
    probes.push_back(std::move(p));
  }
  {
    Probe p{make_chart("sphere_band", {{"theta_max", M_PI / 3.0}}),
            [](const Vec& x) {
              return Vec{std::sin(x[0] + 0.2) * std::cos(x[1]), std::cos(x[0] + x[1])};
            },
            {}};
    for (double th : {-0.7, -0.35, 0.0, 0.35, 0.7})
      for (double ph : {0.3, 1.5, 2.7, 4.0, 5.5}) p.pts.push_back({th, ph});
    probes.push_back(std::move(p));
  }

  const std::vector<double> hs{4e-3, 2e-3, 1e-3, 5e-4};
  double min_slope = 1e300;
  for (const Probe& p : probes) {
    std::vector<double> lx, ly;
    for (double h : hs) {
      double d = 0.0;
      for (const Vec& x : p.pts)
        d = std::max(d, std::fabs(divergence(p.chart, p.X, x, h) -
                                  divergence_christoffel(p.chart, p.X, x, h)));
      lx.push_back(std::log(h));
      ly.push_back(std::log(std::max(d, 1e-300)));
    }
    min_slope = std::min(min_slope, lsq_slope(lx, ly));
  }

  double worst_dual = 0.0;
  {
    const MetricChart flat = make_chart("flat_torus");
    const ScalarFn h = [](const Vec& x) {
      return 0.4 + 0.3 * std::sin(2.0 * M_PI * x[0]) * std::cos(2.0 * M_PI * x[1]);
    };
    const TangentField X = [](const Vec& x) {
      return Vec{std::cos(2.0 * M_PI * x[1]) + 0.2, std::sin(2.0 * M_PI * x[0])};
    };
    const double lhs = integrate(
        flat,
        [&](const Vec& x) {
          const Vec gr = gradient(flat, h, x);
          const Vec Xv = X(x);
          const auto g = metric_at(flat, x);
          return g[0][0] * gr[0] * Xv[0] + g[0][1] * (gr[0] * Xv[1] + gr[1] * Xv[0]) +
                 g[1][1] * gr[1] * Xv[1];
        },
        96, 4);
    const double rhs =
        integrate(flat, [&](const Vec& x) { return h(x) * divergence(flat, X, x); }, 96, 4);
    worst_dual = std::max(worst_dual, std::fabs(lhs + rhs));
  }
  {
    const MetricChart wavy = make_chart("wavy_torus", {{"amp", 0.5}});
    const ScalarFn h = [](const Vec& x) {
      return 0.4 + 0.3 * std::sin(x[0]) * std::cos(x[1]);
    };
    const TangentField X = [](const Vec& x) {
      return Vec{std::cos(x[1]) + 0.2, std::sin(x[0])};
    };
    const double lhs = integrate(
        wavy,
        [&](const Vec& x) {
          const Vec gr = gradient(wavy, h, x);
          const Vec Xv = X(x);
          const auto g = metric_at(wavy, x);
          return g[0][0] * gr[0] * Xv[0] + g[0][1] * (gr[0] * Xv[1] + gr[1] * Xv[0]) +
                 g[1][1] * gr[1] * Xv[1];
        },
        96, 4);
    const double rhs =
        integrate(wavy, [&](const Vec& x) { return h(x) * divergence(wavy, X, x); }, 96, 4);
    worst_dual = std::max(worst_dual, std::fabs(lhs + rhs));
  }

  const bool ok = min_slope >= 1.9 && worst_dual <= 1e-6;
  report(1, label, ok,
         "min slope " + fmt(min_slope) + ", duality residual " + fmt(worst_dual));
}

// ---- criterion 2: smooth entropy dichotomy ---------------------------------

void criterion2() {
  const std::string label = "smooth entropy drift separates the flux classes";
  const MetricChart torus = make_chart("flat_torus");
  const ManifoldMesh mc = build_mesh(torus, 128, 128);
  const FluxFamily fc = scaled_burgers_flux(torus, {0.6, 0.45}, 0.2, "drift");
  std::vector<double> u0c(mc.cell_count());
  for (int c = 0; c < mc.cell_count(); ++c) {
    const Vec& x = mc.cells[c].center;
    u0c[c] = 0.25 * std::sin(2.0 * M_PI * x[0]) * std::sin(2.0 * M_PI * x[1]);
  }

  const ManifoldMesh mg = build_mesh(make_chart("weighted_circle"), 512);
  const FluxFamily fg = make_weighted_flux_1d(KFunction{}, make_profile("burgers"), "wb");
  std::vector<double> u0g(mg.cell_count());
  for (int c = 0; c < mg.cell_count(); ++c)
    u0g[c] = -0.5 * std::cos(2.0 * M_PI * mg.cells[c].center[0]);

  const DichotomyResult res = check_smooth_entropy_dichotomy(
      mc, fc, u0c, mg, fg, u0g, square_entropy_pair(fg), 0.01, 5e-5);
  const bool ok =
      res.drift_compatible <= 1e-4 && res.drift_general >= 1e-2 && res.ratio >= 100.0;
  report(2, label, ok,
         "compatible drift " + fmt(res.drift_compatible) + " <= 1e-4, general drift " +
             fmt(res.drift_general) + " >= 1e-2, ratio " + fmt(res.ratio) + " >= 100");
}

// ---- criteria over the shipped suite ----------------------------------------

void criterion3(const Suite& suite) {
  const std::string label = "L1/L2/Linf nonincreasing on compatible scenarios";
  int count = 0;
  bool ok = true;
  std::string bad;
  for (const auto& [name, r] : suite) {
    if (r.built.lorentzian || !r.built.flux.compatible) continue;
    for (const auto& rep : r.reports) {
      if (rep.property != "lp_stability") continue;
      ++count;
      if (!rep.applicable || !rep.pass) {
        ok = false;
        bad = name + " " + rep.location;
      }
    }
  }
  ok = ok && count >= 10;
  report(3, label, ok,
         std::to_string(count) + " member runs" + (bad.empty() ? "" : ", first failure " + bad));
}

void criterion4(const Suite& suite) {
  const std::string label = "L1 contraction across solver and flux pairings";
  const std::vector<std::string> names{"contraction_pair", "contraction_pair_viscous",
                                       "contraction_weighted",
                                       "contraction_weighted_viscous"};
  int count = 0;
  bool ok = true;
  double worst = 1e300;
  for (const std::string& name : names) {
    const RunResult& r = suite.at(name);
    if (r.built.sc.members != 5) ok = false;
    for (const auto& rep : r.reports) {
      if (rep.property != "l1_contraction") continue;
      ++count;
      worst = std::min(worst, rep.margin);
      if (!rep.pass) ok = false;
    }
  }
  ok = ok && count == 40;
  report(4, label, ok,
         std::to_string(count) + " pairs, worst margin " + fmt(worst));
}

void criterion5(const Suite& suite) {
  const std::string label = "entropy defect constant shrinks under refinement";
  const RunResult& a = suite.at("burgers_shock_n256");
  const RunResult& b = suite.at("burgers_shock_n512");
  const double c1 =
      entropy_rate_constant(a.trajectories.at(0), a.built.flux, a.built.sc.seed);
  const double c2 =
      entropy_rate_constant(b.trajectories.at(0), b.built.flux, b.built.sc.seed);
  const bool ok = (c2 <= c1 / 1.5 + 1e-14) || (c1 <= 1e-10 && c2 <= 1e-10);
  report(5, label, ok, "C(N) " + fmt(c1) + " -> C(2N) " + fmt(c2));
}

void criterion6() {
  const std::string label = "vanishing viscosity approaches the scheme limit";
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 512);
  const FluxFamily flux = scaled_burgers_flux(circle, {1.0, 0.0}, 1.0, "vv");
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return std::sin(2.0 * M_PI * x[0]);
  });
  FVConfig fcfg;
  fcfg.t_end = 0.3;
  fcfg.snapshots = 2;
  const SolutionTrajectory ref = solve_fv(mesh, flux, u0, fcfg);

  const double dx = mesh.dx[0];
  std::vector<double> gaps;
  for (double scale : {4.0, 2.0, 1.0, 0.5}) {
    ViscousConfig vcfg;
    vcfg.epsilon = scale * dx;
    vcfg.form = "advective";
    vcfg.t_end = 0.3;
    vcfg.snapshots = 2;
    const SolutionTrajectory vt = solve_viscous(mesh, flux, u0, vcfg);
    const ScalarField vfin{&mesh, vt.states.back()};
    const ScalarField rfin{&mesh, ref.states.back()};
    gaps.push_back(l1_distance(vfin, rfin));
  }
  bool ok = true;
  for (size_t i = 0; i + 1 < gaps.size(); ++i) ok = ok && gaps[i + 1] < gaps[i];
  const double bound = 5e-2 * lp_norm(u0, 1.0);
  ok = ok && gaps.back() <= bound;
  std::string detail = "gaps";
  for (double g : gaps) detail += " " + fmt(g);
  detail += ", final bound " + fmt(bound);
  report(6, label, ok, detail);
}

void criterion7(const Suite& suite) {
  const std::string label = "characteristic oracle: drift, convergence, straight lines";
  const RunResult& orc = suite.at("oracle_weighted");
  bool ok = true;
  double drift_margin = 1e300;
  int drift_count = 0;
  for (const auto& rep : orc.reports) {
    if (rep.property != "characteristic_drift") continue;
    ++drift_count;
    drift_margin = std::min(drift_margin, rep.margin);
    if (!rep.pass) ok = false;
  }
  ok = ok && drift_count >= 1;

  Scenario sc128 = orc.built.sc;
  sc128.n0 = 128;
  const RunResult r128 = run_scenario_memory(sc128);
  const double e1 = r128.oracle_rows.back()[2];
  const double e2 = orc.oracle_rows.back()[2];
  const double order = std::log2(e1 / e2);
  ok = ok && order >= 0.8;

  WeightedProblem prob;
  prob.k = KFunction{1.0, 0.0, 1.0};
  prob.f = make_profile("burgers");
  prob.u0 = [](double x) { return 0.3 + 0.15 * std::sin(2.0 * M_PI * x); };
  prob.u_lo = 0.0;
  prob.u_hi = 0.6;
  prob.t_max = 0.3;
  double straight = 0.0, worst_drift = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double y = (i + 0.5) / 16.0;
    const Characteristic tr = trace_characteristic(prob, y, 0.25);
    const double exact = y + (0.3 + 0.15 * std::sin(2.0 * M_PI * y)) * 0.25;
    straight = std::max(straight, std::fabs(tr.head() - exact));
    worst_drift = std::max(worst_drift, tr.drift);
  }
  ok = ok && straight <= 1e-6 && worst_drift <= 1e-6;

  report(7, label, ok,
         "drift margin " + fmt(drift_margin) + ", L1 order " + fmt(order) +
             ", straight-line error " + fmt(straight));
}

void criterion8(const Suite& suite) {
  const std::string label = "total variation envelope";
  int flat_count = 0;
  bool ok = true;
  for (const auto& [name, r] : suite) {
    if (r.built.lorentzian) continue;
    for (const auto& rep : r.reports) {
      if (rep.property != "tv_envelope") continue;
      if (!rep.pass) ok = false;
      if (r.built.sc.chart == "flat_circle" && r.built.flux.compatible) ++flat_count;
    }
  }
  ok = ok && flat_count >= 4;
  double c1 = 0.0;
  const RunResult& wavy = suite.at("wavy_torus");
  check_tv_envelope(wavy.trajectories.at(0), wavy.built.flux, &c1);
  report(8, label, ok,
         std::to_string(flat_count) + " flat 1D members capped at 0.01; wavy torus C1 = " +
             fmt(c1) + " (reported only)");
}

void criterion9(const Suite& suite) {
  const std::string label = "time Lipschitz bound on compatible runs";
  int count = 0;
  bool ok = true;
  double worst = 1e300;
  for (const auto& [name, r] : suite) {
    if (r.built.lorentzian || !r.built.flux.compatible || r.built.sc.solver != "fv")
      continue;
    for (const auto& rep : r.reports) {
      if (rep.property != "time_lipschitz") continue;
      ++count;
      worst = std::min(worst, rep.margin);
      if (!rep.pass) ok = false;
    }
  }
  ok = ok && count >= 10;
  report(9, label, ok,
         std::to_string(count) + " member runs, worst margin " + fmt(worst));
}

void criterion10(const Suite& suite) {
  const std::string label = "static spacetimes: lapse value, leaf contraction, margins";
  const auto g = schwarzschild_metric(1.0, 4.0, 0.0);
  bool ok = (g[0] == -0.5);  // exact: 2m/r is a power of two
  int fol = 0, tl = 0;
  for (const auto& [name, r] : suite) {
    if (!r.built.lorentzian) continue;
    for (const auto& rep : r.reports) {
      if (rep.property == "foliation_contraction") {
        ++fol;
        if (!rep.pass) ok = false;
      } else if (rep.property == "timelike_margin") {
        ++tl;
        if (!rep.pass) ok = false;
      }
    }
  }
  ok = ok && fol >= 2 && tl >= 2;
  report(10, label, ok,
         "g_tt(m=1, r=4) = " + fmt(g[0]) + ", " + std::to_string(fol) +
             " leaf contractions, " + std::to_string(tl) + " time-like margins");
}

void criterion11(const fs::path& root_a, const fs::path& root_b) {
  const std::string label = "byte-identical reruns across thread counts";
  set_max_threads(2);
  run_suite(root_b);
  const auto fa = rel_files(root_a);
  const auto fb = rel_files(root_b);
  bool ok = fa == fb && !fa.empty();
  std::string bad;
  if (ok) {
    for (const auto& rel : fa) {
      if (slurp(root_a / rel) != slurp(root_b / rel)) {
        ok = false;
        bad = rel;
        break;
      }
    }
  } else {
    bad = "file sets differ";
  }
  report(11, label, ok,
         std::to_string(fa.size()) + " files compared" + (bad.empty() ? "" : ", " + bad));
}

}  // namespace

int main() {
  const fs::path root_a = "acceptance_a";
  const fs::path root_b = "acceptance_b";

  Suite suite;
  try {
    set_max_threads(4);
    suite = run_suite(root_a);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "scenario suite failed to run: %s\n", e.what());
    return 2;
  }
  for (const auto& [name, r] : suite) {
    if (r.pass()) continue;
    const std::string why = r.aborted ? ": " + r.diagnostic : std::string();
    std::fprintf(stderr, "[suite] %s did not pass cleanly%s\n", name.c_str(), why.c_str());
    for (const auto& rep : r.reports)
      if (!rep.pass)
        std::fprintf(stderr, "[suite]   %s %s: %s\n", rep.property.c_str(),
                     rep.location.c_str(), rep.note.c_str());
  }

  guarded(1, "geometry", criterion1);
  guarded(2, "dichotomy", criterion2);
  guarded(3, "stability", [&] { criterion3(suite); });
  guarded(4, "contraction", [&] { criterion4(suite); });
  guarded(5, "refinement", [&] { criterion5(suite); });
  guarded(6, "vanishing viscosity", criterion6);
  guarded(7, "oracle", [&] { criterion7(suite); });
  guarded(8, "variation", [&] { criterion8(suite); });
  guarded(9, "lipschitz", [&] { criterion9(suite); });
  guarded(10, "lorentzian", [&] { criterion10(suite); });
  guarded(11, "determinism", [&] { criterion11(root_a, root_b); });

  if (failures) {
    std::printf("%d of 11 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 11 criteria hold\n");
  return 0;
}
