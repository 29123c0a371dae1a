#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mcl/fv.hpp"
#include "mcl/lorentzian.hpp"
#include "mcl/properties.hpp"
#include "mcl/viscous.hpp"

namespace mcl {

/// One runnable experiment: manifold + flux + initial data family + solver +
/// property selection. Parsed from the line-oriented key=value format
/// documented in the README (sections [manifold], [flux], [initial],
/// [solver], [properties], [output]; '#' starts a comment).
struct Scenario {
  std::string name = "scenario";
  unsigned long long seed = 1;

  // [manifold]
  std::string chart = "flat_circle";
  std::map<std::string, double> chart_params;
  int n0 = 64;
  int n1 = 0;  // 0 picks the chart default (1 in 1D, n0 in 2D)

  // [flux]
  std::string flux_family = "compatible_transport";
  std::string flux_profile = "burgers";  // linear | burgers | cubic
  std::string flux_field = "constant";   // constant | sine_mix | zonal | conformal
  double flux_a = 1.0;                   // profile scale; null-speed fraction (lorentzian)
  double flux_b = 0.0;                   // cubic time-component weight (lorentzian)
  double field_v1 = 1.0;
  double field_v2 = 0.0;

  // [initial]
  std::string initial = "sine";  // constant | sine | pulse | riemann
  double amplitude = 1.0;
  double mean = 0.0;
  double phase = 0.0;
  double center = 0.5;  // pulse center, fraction of the period
  double width = 0.1;   // pulse radius, fraction of the period
  double left = 1.0;
  double right = 0.0;
  double split = 0.5;  // riemann interface, fraction of the period
  int members = 1;     // family size; member k shifts the profile deterministically

  // [solver]
  std::string solver = "fv";  // fv | viscous | lorentzian | oracle
  std::string scheme;         // fv/oracle: rusanov|engquist_osher; viscous:
                              // advective|conservative|auto; lorentzian:
                              // advective|conservative. Empty -> default.
  double epsilon = 0.0;
  double cfl = 0.4;
  double t_end = 0.5;
  int snapshots = 11;
  double dt_override = 0.0;

  // [properties]: empty -> solver defaults
  std::vector<std::string> properties;

  // [output]
  std::string out_dir;  // empty -> scenario name
};

bool operator==(const Scenario& a, const Scenario& b);

/// Throws ConfigError carrying every issue found (never first-error-only).
Scenario parse_scenario(const std::string& text);
Scenario parse_scenario_file(const std::filesystem::path& file);

/// Canonical form: fixed section order, every key explicit, 17-digit floats.
/// parse(serialize(sc)) == sc for any valid sc.
std::string serialize_scenario(const Scenario& sc);

std::string default_scheme(const std::string& solver);

/// Mesh, flux and initial data realized from a validated scenario.
struct BuiltScenario {
  Scenario sc;
  MetricChart chart;
  std::shared_ptr<ManifoldMesh> mesh;
  FluxFamily flux;  // riemannian solvers
  bool lorentzian = false;
  FoliatedSpacetime spacetime;
  TimelikeFlux tflux;
  std::vector<ScalarFn> initial_data;  // one per member
};

BuiltScenario build_scenario(const Scenario& sc);

/// Riemannian flux shared by run and verify: family/profile/field plus the
/// chart-owned weight k(x) for weighted_1d.
FluxFamily make_scenario_flux(const MetricChart& chart, const std::string& family,
                              const std::string& profile, const std::string& field,
                              double a, double v1, double v2);

struct RunResult {
  BuiltScenario built;
  std::vector<SolutionTrajectory> trajectories;  // one per member
  std::vector<PropertyReport> reports;
  std::vector<std::array<double, 4>> oracle_rows;  // member, t, l1 diff, max diff
  std::filesystem::path dir;  // empty for in-memory runs
  bool aborted = false;
  std::string diagnostic;
  bool pass() const;
};

/// Runs all members, writes member_<k>/ trajectory dirs, reports.csv/.txt and
/// (for oracle scenarios) oracle_compare.csv under out_root/<dir>. Solver
/// aborts are caught: aborted=true, diagnostic.txt written, pass()==false.
RunResult run_scenario(const Scenario& sc, const std::filesystem::path& out_root);

/// Same pipeline without touching the filesystem (acceptance reuse).
RunResult run_scenario_memory(const Scenario& sc);

/// $MCL_OUT_ROOT or "out".
std::filesystem::path default_out_root();

/// Re-checks a written trajectory directory: rebuilds mesh and flux from
/// trajectory.meta and runs the single-run property checks for its scheme.
std::vector<PropertyReport> verify_directory(const std::filesystem::path& dir);

}  // namespace mcl
