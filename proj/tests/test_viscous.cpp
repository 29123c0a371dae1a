#include <cmath>

#include "doctest.h"
#include "mcl/viscous.hpp"

using namespace mcl;

namespace {

FluxFamily zero_field_flux(const MetricChart& chart) {
  return make_compatible_flux(chart, [](const Vec&) { return Vec{0.0, 0.0}; },
                              make_profile("burgers"), "rest");
}

}  // namespace

TEST_SUITE("viscous") {

TEST_CASE("pure diffusion matches the heat kernel decay") {
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 128);
  const FluxFamily flux = zero_field_flux(circle);
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return std::sin(2.0 * M_PI * x[0]);
  });
  ViscousConfig cfg;
  cfg.epsilon = 0.05;
  cfg.form = "advective";
  cfg.t_end = 0.01;
  cfg.dt_override = 3e-5;
  cfg.snapshots = 2;
  const SolutionTrajectory traj = solve_viscous(mesh, flux, u0, cfg);
  const double inf = std::numeric_limits<double>::infinity();
  const double ratio = lp_norm(traj.at(1), inf) / lp_norm(traj.at(0), inf);
  // exp(-eps (2 pi)^2 t) = 0.98045...
  CHECK(ratio == doctest::Approx(0.9805).epsilon(5e-4));
}

TEST_CASE("advective form refuses non-compatible fluxes") {
  const ManifoldMesh mesh = build_mesh(make_chart("weighted_circle"), 64);
  const FluxFamily flux =
      make_weighted_flux_1d(KFunction{}, make_profile("burgers"), "wb");
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return 0.2 + 0.1 * std::sin(2.0 * M_PI * x[0]);
  });
  ViscousConfig cfg;
  cfg.epsilon = 0.02;
  cfg.form = "advective";
  cfg.t_end = 0.01;
  CHECK_THROWS_AS(solve_viscous(mesh, flux, u0, cfg), SolverError);
}

TEST_CASE("auto form picks the right stepper") {
  ViscousConfig cfg;
  cfg.epsilon = 0.02;
  cfg.t_end = 0.005;
  cfg.snapshots = 2;

  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 64);
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return 0.3 * std::sin(2.0 * M_PI * x[0]);
  });
  const SolutionTrajectory adv = solve_viscous(mesh, zero_field_flux(circle), u0, cfg);
  CHECK(adv.meta.at("scheme") == "viscous_advective");

  const ManifoldMesh wmesh = build_mesh(make_chart("weighted_circle"), 64);
  const FluxFamily wflux =
      make_weighted_flux_1d(KFunction{}, make_profile("burgers"), "wb");
  const ScalarField w0 = sample_field(wmesh, [](const Vec& x) {
    return 0.3 * std::sin(2.0 * M_PI * x[0]);
  });
  const SolutionTrajectory con = solve_viscous(wmesh, wflux, w0, cfg);
  CHECK(con.meta.at("scheme") == "viscous_conservative");

  // Conservative runs keep the weighted mass.
  CHECK(integrate_field(con.at(0)) ==
        doctest::Approx(integrate_field(con.at(1))).epsilon(1e-12));
}

TEST_CASE("mollifier is mass preserving and smoothing") {
  const ManifoldMesh mesh = build_mesh(make_chart("flat_circle"), 128);
  // alternates cell to cell: sin(pi (i + 1/2)) = (-1)^i at the centers
  ScalarField rough = sample_field(mesh, [](const Vec& x) {
    return (std::sin(128.0 * M_PI * x[0]) > 0.0) ? 1.0 : 0.0;
  });
  const ScalarField smooth = mollify(mesh, rough);
  CHECK(integrate_field(smooth) == doctest::Approx(integrate_field(rough)).epsilon(1e-12));
  CHECK(total_variation(smooth) < 0.1 * total_variation(rough));

  const ScalarField flat = sample_field(mesh, [](const Vec&) { return 0.7; });
  const ScalarField still = mollify(mesh, flat);
  for (double v : still.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("epsilon ladder") {
  const auto eps = epsilon_schedule(0.01);
  REQUIRE(eps.size() == 4);
  CHECK(eps[0] == doctest::Approx(0.04));
  CHECK(eps[1] == doctest::Approx(0.02));
  CHECK(eps[2] == doctest::Approx(0.01));
  CHECK(eps[3] == doctest::Approx(0.005));
}

TEST_CASE("peclet floor") {
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 64);
  const FluxFamily flux = make_compatible_flux(
      circle, [](const Vec&) { return Vec{1.0, 0.0}; }, make_profile("burgers"), "b");
  CHECK(peclet_epsilon_floor(mesh, flux, -1.0, 1.0) ==
        doctest::Approx(0.5 / 64.0).epsilon(1e-10));
}

TEST_CASE("viscous burgers dissipates the square entropy") {
  const MetricChart circle = make_chart("flat_circle");
  const ManifoldMesh mesh = build_mesh(circle, 128);
  const FluxFamily flux = make_compatible_flux(
      circle, [](const Vec&) { return Vec{1.0, 0.0}; }, make_profile("burgers"), "b");
  const ScalarField u0 = sample_field(mesh, [](const Vec& x) {
    return std::sin(2.0 * M_PI * x[0]);
  });
  ViscousConfig cfg;
  cfg.epsilon = 0.01;
  cfg.t_end = 0.2;
  cfg.snapshots = 5;
  const SolutionTrajectory traj = solve_viscous(mesh, flux, u0, cfg);
  const EntropyPair sq = square_entropy_pair(flux);
  double prev = entropy_integral(mesh, sq, traj.at(0));
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const double e = entropy_integral(mesh, sq, traj.at(i));
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  CHECK(entropy_dissipation(mesh, sq, traj.at(0), cfg.epsilon) >= 0.0);
  // The max principle survives the parabolic regularization.
  for (const auto& state : traj.states) {
    for (double v : state) {
      CHECK(v <= 1.0 + 1e-12);
      CHECK(v >= -1.0 - 1e-12);
    }
  }
}

}  // TEST_SUITE
