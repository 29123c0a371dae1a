#include <cmath>

#include "doctest.h"
#include "mcl/fv.hpp"

using namespace mcl;

namespace {

FluxFamily burgers_on(const MetricChart& chart, double a, const Vec& v) {
  ScalarProfile p = make_profile("burgers");
  auto val = p.value, der = p.deriv;
  p.value = [val, a](double u) { return a * val(u); };
  p.deriv = [der, a](double u) { return a * der(u); };
  return make_compatible_flux(chart, [v](const Vec&) { return v; }, p, "burgers");
}

}  // namespace

TEST_SUITE("fv") {

TEST_CASE("two-point fluxes against hand values") {
  const auto fn = [](double u) { return 0.5 * u * u; };
  CHECK(interface_flux_rusanov(fn, 1.0, -1.0, 1.0) == doctest::Approx(1.5));
  CHECK(interface_flux_rusanov(fn, 0.4, 0.4, 2.0) == doctest::Approx(0.08));
  // EO on Burgers with a sonic interval: q = mean - (1/2) |int |u||.
  CHECK(interface_flux_engquist_osher(fn, 1.0, -1.0, {0.0}) == doctest::Approx(1.0));
  CHECK(interface_flux_engquist_osher(fn, -1.0, 1.0, {0.0}) == doctest::Approx(0.0));
  CHECK(interface_flux_engquist_osher(fn, 0.5, 0.2, {0.0}) == doctest::Approx(0.125));
}

TEST_CASE("constant states are exact fixed points") {
  const MetricChart torus = make_chart("flat_torus");
  const ManifoldMesh mesh = build_mesh(torus, 24, 24);
  const TangentField mix = [](const Vec& x) {
    return Vec{0.7 * std::sin(2.0 * M_PI * x[1]), 0.4 * std::sin(2.0 * M_PI * x[0])};
  };
  const FluxFamily flux =
      make_compatible_flux(torus, mix, make_profile("burgers"), "mix");
  FVConfig cfg;
  cfg.t_end = 0.1;
  cfg.snapshots = 3;
  const ScalarField u0 = sample_field(mesh, [](const Vec&) { return 0.37; });
  const SolutionTrajectory traj = solve_fv(mesh, flux, u0, cfg);
  for (double v : traj.states.back()) CHECK(v == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("burgers shock travels at speed one half") {
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 256);
  const FluxFamily flux = burgers_on(circle, 1.0, {1.0, 0.0});
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return (x[0] < 0.5 && x[0] >= 0.05) ? 1.0 : 0.0;
  });
  FVConfig cfg;
  cfg.t_end = 0.3;
  cfg.snapshots = 2;
  const SolutionTrajectory traj = solve_fv(mesh, flux, u0, cfg);
  const auto& u = traj.states.back();
  // Falling shock from x = 0.5 moves at (f(1)-f(0))/(1-0) = 1/2.
  double pos = 0.0;
  for (int c = 64; c + 1 < 220; ++c) {
    if (u[c] >= 0.5 && u[c + 1] < 0.5) {
      const double x = mesh.cells[c].center[0];
      pos = x + mesh.dx[0] * (u[c] - 0.5) / std::max(1e-12, u[c] - u[c + 1]);
      break;
    }
  }
  CHECK(pos == doctest::Approx(0.65).epsilon(0.02));
  // Mass is conserved to rounding on the periodic circle.
  CHECK(integrate_field(traj.at(0)) ==
        doctest::Approx(integrate_field(traj.at(1))).epsilon(1e-13));
}

TEST_CASE("step rejects an unstable dt") {
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 64);
  const FluxFamily flux = burgers_on(circle, 1.0, {1.0, 0.0});
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return std::sin(2.0 * M_PI * x[0]);
  });
  CHECK_THROWS_AS(fv_step(mesh, flux, u0, 10.0), SolverError);
  const double dt = fv_stable_dt(mesh, flux, -1.0, 1.0, 0.4);
  CHECK(dt > 0.0);
  CHECK_NOTHROW(fv_step(mesh, flux, u0, dt));
}

TEST_CASE("snapshot schedule") {
  FVConfig cfg;
  cfg.t_end = 1.0;
  cfg.snapshots = 5;
  const auto times = make_snapshot_times(cfg);
  REQUIRE(times.size() == 5);
  CHECK(times.front() == doctest::Approx(0.0));
  CHECK(times[2] == doctest::Approx(0.5));
  CHECK(times.back() == doctest::Approx(1.0));

  cfg.snapshot_times = {0.0, 0.1, 0.7};
  CHECK(make_snapshot_times(cfg) == std::vector<double>{0.0, 0.1, 0.7});
}

TEST_CASE("linear advection converges to the translate") {
  const MetricChart circle = make_chart("flat_circle");
  double err[2];
  int idx = 0;
  for (int n : {64, 128}) {
    const ManifoldMesh mesh = build_mesh(circle, n);
    const FluxFamily flux = make_compatible_flux(
        circle, [](const Vec&) { return Vec{1.0, 0.0}; }, make_profile("linear"), "adv");
    const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
      return std::sin(2.0 * M_PI * x[0]);
    });
    FVConfig cfg;
    cfg.t_end = 0.25;
    cfg.snapshots = 2;
    const SolutionTrajectory traj = solve_fv(mesh, flux, u0, cfg);
    const ScalarField exact = sample_field(mesh, [](const Vec& x) {
      return std::sin(2.0 * M_PI * (x[0] - 0.25));
    });
    err[idx++] = l1_distance(traj.at(1), exact);
  }
  CHECK(err[1] < 0.7 * err[0]);
}

TEST_CASE("engquist-osher run keeps the max principle") {
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 128);
  const FluxFamily flux = burgers_on(circle, 1.0, {1.0, 0.0});
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return std::sin(2.0 * M_PI * x[0]);
  });
  FVConfig cfg;
  cfg.numerical_flux = "engquist_osher";
  cfg.t_end = 0.4;
  cfg.snapshots = 5;
  const SolutionTrajectory traj = solve_fv(mesh, flux, u0, cfg);
  for (const auto& state : traj.states) {
    for (double v : state) {
      CHECK(v <= 1.0 + 1e-12);
      CHECK(v >= -1.0 - 1e-12);
    }
  }
  CHECK(traj.meta.at("scheme") == "fv_engquist_osher");
}

}  // TEST_SUITE
