#include <cmath>

#include "doctest.h"
#include "mcl/geometry.hpp"

using namespace mcl;

TEST_SUITE("geometry") {

TEST_CASE("chart registry") {
  const auto names = chart_names();
  CHECK(names.size() == 6);
  for (const auto& n : names) CHECK_NOTHROW(make_chart(n));
  CHECK_THROWS_AS(make_chart("flat_cirlce"), GeometryError);
}

TEST_CASE("flat circle is unit metric") {
  const MetricChart c = make_chart("flat_circle", {{"L", 2.0}});
  CHECK(c.dim == 1);
  CHECK(c.period[0] == doctest::Approx(2.0));
  CHECK(metric_at(c, {0.3, 0.0})[0][0] == doctest::Approx(1.0));
  CHECK(sqrt_det_metric(c, {1.7, 0.0}) == doctest::Approx(1.0));
  const auto gamma = christoffel(c, {0.9, 0.0});
  CHECK(gamma.at(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("weighted circle metric and connection") {
  const MetricChart c = make_chart("weighted_circle");  // k = 2 + sin(2 pi x)
  const double x = 0.3;
  const double k = 2.0 + std::sin(2.0 * M_PI * x);
  const double kp = 2.0 * M_PI * std::cos(2.0 * M_PI * x);
  CHECK(metric_at(c, {x, 0.0})[0][0] == doctest::Approx(k * k).epsilon(1e-14));
  CHECK(sqrt_det_metric(c, {x, 0.0}) == doctest::Approx(k).epsilon(1e-14));
  // Gamma^1_11 = k'/k for g = k^2 dx^2.
  CHECK(christoffel(c, {x, 0.0}).at(0, 0, 0) ==
        doctest::Approx(kp / k).epsilon(1e-9));
  CHECK_THROWS_AS(make_chart("weighted_circle", {{"k0", 1.0}, {"k1", 2.0}}),
                  GeometryError);
}

TEST_CASE("sphere band connection against the closed form") {
  const MetricChart c = make_chart("sphere_band");  // theta_max = pi/3
  const Vec x{M_PI / 6.0, 1.1};
  // Gamma^theta_{phi phi} = cos(theta) sin(theta) = sqrt(3)/4 at pi/6.
  CHECK(christoffel(c, x).at(0, 1, 1) ==
        doctest::Approx(0.43301270189221932).epsilon(1e-9));
  // Gamma^phi_{theta phi} = -tan(theta).
  CHECK(christoffel(c, x).at(1, 0, 1) ==
        doctest::Approx(-std::tan(M_PI / 6.0)).epsilon(1e-9));
  CHECK(sqrt_det_metric(c, x) == doctest::Approx(std::cos(M_PI / 6.0)).epsilon(1e-12));
}

TEST_CASE("wavy torus inverse metric") {
  const MetricChart c = make_chart("wavy_torus", {{"amp", 0.5}});
  const Vec x{1.1, 2.3};
  const Mat g = metric_at(c, x);
  const Mat gi = metric_inverse(g, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int k = 0; k < 2; ++k) s += g[i][k] * gi[k][j];
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(make_chart("wavy_torus", {{"amp", 1.2}}), GeometryError);
}

TEST_CASE("divergence forms agree on the wavy torus") {
  const MetricChart c = make_chart("wavy_torus");
  const TangentField X = [](const Vec& x) {
    return Vec{std::sin(x[0]) + 0.3, std::cos(x[1]) * std::sin(2.0 * x[0])};
  };
  for (double a : {0.7, 2.9}) {
    for (double b : {0.4, 4.1}) {
      const Vec x{a, b};
      CHECK(divergence(c, X, x) ==
            doctest::Approx(divergence_christoffel(c, X, x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("conformal field is divergence free in both forms") {
  const MetricChart c = make_chart("wavy_torus", {{"amp", 0.5}});
  const double amp = 0.5;
  const TangentField X = [amp](const Vec& x) {
    const double phi = 1.0 + amp * std::sin(x[0]) * std::sin(x[1]);
    return Vec{0.5 / (phi * phi), 0.4 / (phi * phi)};
  };
  const Vec x{2.2, 0.9};
  CHECK(std::abs(divergence(c, X, x)) < 1e-7);
  CHECK(std::abs(divergence_christoffel(c, X, x)) < 1e-7);
}

TEST_CASE("gradient raises the index") {
  const MetricChart flat = make_chart("flat_torus");
  const ScalarFn h = [](const Vec& x) { return std::sin(2.0 * M_PI * x[0]); };
  const Vec x{0.23, 0.61};
  const Vec g = gradient(flat, h, x);
  CHECK(g[0] == doctest::Approx(2.0 * M_PI * std::cos(2.0 * M_PI * 0.23)).epsilon(1e-7));
  CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-9));

  const MetricChart w = make_chart("weighted_circle");
  const double k = 2.0 + std::sin(2.0 * M_PI * 0.23);
  const Vec gw = gradient(w, h, {0.23, 0.0});
  CHECK(gw[0] ==
        doctest::Approx(2.0 * M_PI * std::cos(2.0 * M_PI * 0.23) / (k * k)).epsilon(1e-7));
}

TEST_CASE("laplace-beltrami closed forms") {
  const MetricChart flat = make_chart("flat_circle");
  const ScalarFn h = [](const Vec& x) { return std::sin(2.0 * M_PI * x[0]); };
  CHECK(laplace_beltrami(flat, h, {0.37, 0.0}) ==
        doctest::Approx(-4.0 * M_PI * M_PI * std::sin(2.0 * M_PI * 0.37)).epsilon(1e-4));

  // On the sphere band, Lap sin(phi) = -sin(phi)/cos^2(theta).
  const MetricChart sb = make_chart("sphere_band");
  const ScalarFn f = [](const Vec& x) { return std::sin(x[1]); };
  const Vec x{M_PI / 6.0, 0.7};
  CHECK(laplace_beltrami(sb, f, x) ==
        doctest::Approx(-std::sin(0.7) / 0.75).epsilon(1e-4));
}

TEST_CASE("integration against exact volumes") {
  const ScalarFn one = [](const Vec&) { return 1.0; };
  CHECK(integrate(make_chart("flat_torus", {{"L1", 2.0}, {"L2", 3.0}}), one) ==
        doctest::Approx(6.0).epsilon(1e-12));
  // Sphere band: 2 pi * 2 sin(theta_max) with theta_max = pi/3.
  CHECK(integrate(make_chart("sphere_band"), one) ==
        doctest::Approx(2.0 * M_PI * std::sqrt(3.0)).epsilon(1e-9));
  // Wavy torus: int (1 + a sin sin)^2 = 4 pi^2 + a^2 pi^2.
  CHECK(integrate(make_chart("wavy_torus", {{"amp", 0.5}}), one) ==
        doctest::Approx(4.25 * M_PI * M_PI).epsilon(1e-9));
}

TEST_CASE("gradient-divergence duality on the flat torus") {
  const MetricChart c = make_chart("flat_torus");
  const double tp = 2.0 * M_PI;
  const ScalarFn h = [tp](const Vec& x) {
    return 0.4 + 0.3 * std::sin(tp * x[0]) * std::cos(tp * x[1]);
  };
  const TangentField X = [tp](const Vec& x) {
    return Vec{std::cos(tp * x[1]) + 0.2, std::sin(tp * x[0])};
  };
  const ScalarFn pairing = [&](const Vec& x) {
    const Vec gr = gradient(c, h, x);
    const Mat g = metric_at(c, x);
    double s = 0.0;
    const Vec v = X(x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += g[i][j] * gr[i] * v[j];
    return s;
  };
  const ScalarFn hdiv = [&](const Vec& x) { return h(x) * divergence(c, X, x); };
  CHECK(std::abs(integrate(c, pairing) + integrate(c, hdiv)) < 1e-6);
}

TEST_CASE("schwarzschild leaf chart") {
  CHECK_THROWS_AS(make_chart("schwarzschild_r", {{"m", 1.0}, {"r0", 2.0}, {"r1", 8.0}}),
                  GeometryError);
  const MetricChart c =
      make_chart("schwarzschild_r", {{"m", 1.0}, {"r0", 2.5}, {"r1", 8.0}});
  CHECK(c.periodic[0] == false);
  CHECK(metric_at(c, {4.0, 0.0})[0][0] == doctest::Approx(2.0).epsilon(1e-14));
}

}  // TEST_SUITE
