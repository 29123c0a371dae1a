#include <cmath>

#include "doctest.h"
#include "mcl/lax_oracle.hpp"

using namespace mcl;

namespace {

WeightedProblem flat_burgers(std::function<double(double)> u0) {
  WeightedProblem p;
  p.k = KFunction{1.0, 0.0, 1.0};
  p.f = make_profile("burgers");
  p.u0 = std::move(u0);
  p.u_lo = -1.2;
  p.u_hi = 1.2;
  return p;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("branch inverse against the closed form") {
  const ScalarProfile bur = make_profile("burgers");
  for (double z : {0.005, 0.18, 0.5}) {
    CHECK(std::abs(branch_inverse(bur, z, +1) - std::sqrt(2.0 * z)) < 1e-12);
    CHECK(std::abs(branch_inverse(bur, z, -1) + std::sqrt(2.0 * z)) < 1e-12);
  }
  CHECK_THROWS_AS(branch_inverse(bur, -0.1, +1), FluxError);
}

TEST_CASE("constant weight characteristics are straight lines") {
  const WeightedProblem p = flat_burgers([](double y) {
    return 0.3 + 0.2 * std::sin(2.0 * M_PI * y);
  });
  for (double y : {0.1, 0.45, 0.8}) {
    const Characteristic ch = trace_characteristic(p, y, 0.25);
    const double u = p.u0(y);
    CHECK(std::abs(ch.head() - (y + u * 0.25)) < 1e-6);
    CHECK(ch.drift < 1e-10);
    CHECK(ch.values.back() == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("negative data rides the falling branch") {
  const WeightedProblem p = flat_burgers([](double) { return -0.4; });
  const Characteristic ch = trace_characteristic(p, 0.3, 0.2);
  CHECK(ch.branch == -1);
  CHECK(ch.values.back() == doctest::Approx(-0.4).epsilon(1e-9));
  // Burgers speed f'(u) = u < 0: the foot drifts left.
  CHECK(ch.head() < 0.3);
}

TEST_CASE("sine data crosses at t = 1/(2 pi)") {
  const WeightedProblem p = flat_burgers([](double y) {
    return std::sin(2.0 * M_PI * y);
  });
  const double t_star = crossing_time(p);
  CHECK(t_star == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(0.02));
}

TEST_CASE("no crossing comes back infinite") {
  WeightedProblem p = flat_burgers([](double) { return 0.25; });
  p.t_max = 0.5;
  CHECK(std::isinf(crossing_time(p)));
}

TEST_CASE("smooth solve reproduces linear transport") {
  WeightedProblem p;
  p.k = KFunction{1.0, 0.0, 1.0};
  p.f = make_profile("linear");
  p.u0 = [](double y) { return 0.2 + 0.1 * std::cos(2.0 * M_PI * y); };
  std::vector<double> grid;
  for (int i = 0; i < 128; ++i) grid.push_back((i + 0.5) / 128.0);
  const auto v = smooth_solve(p, 0.3, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = p.u0(grid[i] - 0.3);
    CHECK(std::abs(v[i] - exact) < 1e-5);
  }
}

TEST_CASE("smooth solve short-circuits at t = 0") {
  const WeightedProblem p = flat_burgers([](double y) {
    return 0.1 + 0.4 * std::sin(2.0 * M_PI * y);
  });
  const std::vector<double> grid{0.1, 0.3, 0.9};
  const auto v = smooth_solve(p, 0.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(v[i] == doctest::Approx(p.u0(grid[i])).epsilon(1e-14));
  }
}

TEST_CASE("smooth solve refuses post-shock queries") {
  const WeightedProblem p = flat_burgers([](double y) {
    return std::sin(2.0 * M_PI * y);
  });
  CHECK_THROWS_AS(smooth_solve(p, 0.5, {0.5}), SolverError);
}

TEST_CASE("nonconstant weight conserves k f(v) along characteristics") {
  WeightedProblem p;
  p.k = KFunction{};  // 2 + sin(2 pi x)
  p.f = make_profile("burgers");
  p.u0 = [](double y) { return 0.3 + 0.15 * std::sin(2.0 * M_PI * y); };
  p.u_lo = 0.0;
  p.u_hi = 0.6;
  for (int i = 0; i < 8; ++i) {
    const Characteristic ch = trace_characteristic(p, (i + 0.5) / 8.0, 0.5);
    CHECK(ch.drift < 1e-8);
  }
}

TEST_CASE("problem validation") {
  WeightedProblem bad = flat_burgers([](double) { return 0.0; });
  bad.k = KFunction{1.0, 2.0, 1.0};  // min k < 0
  CHECK_THROWS_AS(validate_problem(bad), FluxError);

  WeightedProblem concave = flat_burgers([](double) { return -0.5; });
  concave.f = make_profile("cubic");  // f'' = 2u < 0 below zero
  concave.u_lo = -1.0;
  concave.u_hi = -0.1;
  CHECK_THROWS_AS(validate_problem(concave), FluxError);
}

}  // TEST_SUITE
