#include "mcl/geometry.hpp"

#include <cmath>

#include "mcl/numerics.hpp"

namespace mcl {

namespace {

std::string point_string(const MetricChart& chart, const Vec& x) {
  std::string s = "chart '" + chart.name + "' at (" + format17(x[0]);
  if (chart.dim == 2) s += ", " + format17(x[1]);
  return s + ")";
}

Vec shifted(const Vec& x, int axis, double h) {
  Vec y = x;
  y[axis] += h;
  return y;
}

}  // namespace

double metric_det(const Mat& g, int dim) {
  if (dim == 1) return g[0][0];
  return g[0][0] * g[1][1] - g[0][1] * g[1][0];
}

Mat metric_inverse(const Mat& g, int dim) {
  Mat inv{{{0.0, 0.0}, {0.0, 0.0}}};
  if (dim == 1) {
    inv[0][0] = 1.0 / g[0][0];
    inv[1][1] = 1.0;
    return inv;
  }
  const double det = metric_det(g, 2);
  inv[0][0] = g[1][1] / det;
  inv[1][1] = g[0][0] / det;
  inv[0][1] = -g[0][1] / det;
  inv[1][0] = -g[1][0] / det;
  return inv;
}

Mat metric_at(const MetricChart& chart, const Vec& x) {
  Mat g = chart.metric(x);
  if (chart.dim == 1) {
    g[0][1] = g[1][0] = 0.0;
    g[1][1] = 1.0;
  }
  // Sylvester criterion; rejects evaluation outside the chart's validity.
  const bool ok = chart.dim == 1 ? g[0][0] > 0.0
                                 : (g[0][0] > 0.0 && metric_det(g, 2) > 0.0);
  if (!ok) {
    throw GeometryError("metric not positive definite on " + point_string(chart, x));
  }
  return g;
}

double sqrt_det_metric(const MetricChart& chart, const Vec& x) {
  return std::sqrt(metric_det(metric_at(chart, x), chart.dim));
}

std::array<Mat, 2> metric_derivatives(const MetricChart& chart, const Vec& x) {
  if (chart.metric_deriv) return chart.metric_deriv(x);
  std::array<Mat, 2> d{};
  for (int k = 0; k < chart.dim; ++k) {
    const double h = 1e-5 * chart.period[k];
    const Mat gp = metric_at(chart, shifted(x, k, h));
    const Mat gm = metric_at(chart, shifted(x, k, -h));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) d[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
  }
  return d;
}

ChristoffelSymbols christoffel(const MetricChart& chart, const Vec& x) {
  const Mat ginv = metric_inverse(metric_at(chart, x), chart.dim);
  const std::array<Mat, 2> dg = metric_derivatives(chart, x);
  ChristoffelSymbols out;
  const int n = chart.dim;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += ginv[i][l] * (dg[k][l][j] + dg[j][k][l] - dg[l][k][j]);
        }
        out.g[i][k][j] = 0.5 * s;
      }
  return out;
}

double divergence(const MetricChart& chart, const TangentField& X, const Vec& x,
                  double step_rel) {
  const double sg = sqrt_det_metric(chart, x);
  double acc = 0.0;
  for (int j = 0; j < chart.dim; ++j) {
    const double h = step_rel * chart.period[j];
    const Vec xp = shifted(x, j, h);
    const Vec xm = shifted(x, j, -h);
    const double fp = sqrt_det_metric(chart, xp) * X(xp)[j];
    const double fm = sqrt_det_metric(chart, xm) * X(xm)[j];
    acc += (fp - fm) / (2.0 * h);
  }
  return acc / sg;
}

double divergence_christoffel(const MetricChart& chart, const TangentField& X, const Vec& x,
                              double step_rel) {
  const ChristoffelSymbols gamma = christoffel(chart, x);
  const Vec Xx = X(x);
  double acc = 0.0;
  for (int j = 0; j < chart.dim; ++j) {
    const double h = step_rel * chart.period[j];
    acc += (X(shifted(x, j, h))[j] - X(shifted(x, j, -h))[j]) / (2.0 * h);
  }
  for (int k = 0; k < chart.dim; ++k) {
    double trace = 0.0;
    for (int j = 0; j < chart.dim; ++j) trace += gamma.at(j, k, j);
    acc += trace * Xx[k];
  }
  return acc;
}

Vec gradient(const MetricChart& chart, const ScalarFn& h, const Vec& x, double step_rel) {
  const Mat ginv = metric_inverse(metric_at(chart, x), chart.dim);
  Vec dh{0.0, 0.0};
  for (int j = 0; j < chart.dim; ++j) {
    const double step = step_rel * chart.period[j];
    dh[j] = (h(shifted(x, j, step)) - h(shifted(x, j, -step))) / (2.0 * step);
  }
  Vec out{0.0, 0.0};
  for (int i = 0; i < chart.dim; ++i)
    for (int j = 0; j < chart.dim; ++j) out[i] += ginv[i][j] * dh[j];
  return out;
}

double laplace_beltrami(const MetricChart& chart, const ScalarFn& h, const Vec& x,
                        double step_rel) {
  const Mat ginv = metric_inverse(metric_at(chart, x), chart.dim);
  const ChristoffelSymbols gamma = christoffel(chart, x);
  const int n = chart.dim;
  const double h0 = h(x);

  double first[2] = {0.0, 0.0};
  double second[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int i = 0; i < n; ++i) {
    const double hi = step_rel * chart.period[i];
    const double fp = h(shifted(x, i, hi));
    const double fm = h(shifted(x, i, -hi));
    first[i] = (fp - fm) / (2.0 * hi);
    second[i][i] = (fp - 2.0 * h0 + fm) / (hi * hi);
  }
  if (n == 2) {
    const double hx = step_rel * chart.period[0];
    const double hy = step_rel * chart.period[1];
    const double fpp = h({x[0] + hx, x[1] + hy});
    const double fpm = h({x[0] + hx, x[1] - hy});
    const double fmp = h({x[0] - hx, x[1] + hy});
    const double fmm = h({x[0] - hx, x[1] - hy});
    second[0][1] = second[1][0] = (fpp - fpm - fmp + fmm) / (4.0 * hx * hy);
  }

  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double corr = 0.0;
      for (int k = 0; k < n; ++k) corr += gamma.at(k, i, j) * first[k];
      acc += ginv[i][j] * (second[i][j] - corr);
    }
  return acc;
}

double integrate(const MetricChart& chart, const ScalarFn& fn, int panels_per_axis,
                 int gauss_order) {
  const Quadrature& q = gauss_legendre(gauss_order);
  const int n0 = panels_per_axis;
  const int n1 = chart.dim == 2 ? panels_per_axis : 1;
  const double d0 = chart.period[0] / n0;
  const double d1 = chart.dim == 2 ? chart.period[1] / n1 : 1.0;
  std::vector<double> panel_sums;
  panel_sums.reserve(static_cast<size_t>(n0) * n1);
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i0 = 0; i0 < n0; ++i0) {
      const double a0 = chart.origin[0] + i0 * d0;
      const double a1 = chart.origin[1] + i1 * d1;
      double s = 0.0;
      for (int a = 0; a < gauss_order; ++a) {
        const double x0 = a0 + 0.5 * d0 * (1.0 + q.nodes[a]);
        if (chart.dim == 1) {
          const Vec x{x0, 0.0};
          s += q.weights[a] * fn(x) * sqrt_det_metric(chart, x);
          continue;
        }
        for (int b = 0; b < gauss_order; ++b) {
          const double x1 = a1 + 0.5 * d1 * (1.0 + q.nodes[b]);
          const Vec x{x0, x1};
          s += q.weights[a] * q.weights[b] * fn(x) * sqrt_det_metric(chart, x);
        }
      }
      const double jac = chart.dim == 1 ? 0.5 * d0 : 0.25 * d0 * d1;
      panel_sums.push_back(s * jac);
    }
  }
  return pairwise_sum(panel_sums);
}

namespace {

double param_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

MetricChart make_flat_circle(const std::map<std::string, double>& params) {
  MetricChart c;
  c.name = "flat_circle";
  c.dim = 1;
  const double L = param_or(params, "L", 1.0);
  if (L <= 0.0) throw GeometryError("flat_circle: L must be positive");
  c.period = {L, 1.0};
  c.periodic = {true, true};
  c.metric = [](const Vec&) { return Mat{{{1.0, 0.0}, {0.0, 1.0}}}; };
  c.metric_deriv = [](const Vec&) { return std::array<Mat, 2>{}; };
  c.params = {{"L", L}};
  return c;
}

MetricChart make_weighted_circle(const std::map<std::string, double>& params) {
  MetricChart c;
  c.name = "weighted_circle";
  c.dim = 1;
  const double k0 = param_or(params, "k0", 2.0);
  const double k1 = param_or(params, "k1", 1.0);
  const double freq = param_or(params, "freq", 1.0);
  if (k0 - std::abs(k1) <= 0.0) {
    throw GeometryError("weighted_circle: k0 - |k1| must be positive, got k0=" +
                        format17(k0) + " k1=" + format17(k1));
  }
  const double w = 2.0 * M_PI * freq;
  c.period = {1.0, 1.0};
  c.periodic = {true, true};
  c.metric = [k0, k1, w](const Vec& x) {
    const double k = k0 + k1 * std::sin(w * x[0]);
    return Mat{{{k * k, 0.0}, {0.0, 1.0}}};
  };
  c.metric_deriv = [k0, k1, w](const Vec& x) {
    const double k = k0 + k1 * std::sin(w * x[0]);
    const double dk = k1 * w * std::cos(w * x[0]);
    std::array<Mat, 2> d{};
    d[0][0][0] = 2.0 * k * dk;
    return d;
  };
  c.params = {{"k0", k0}, {"k1", k1}, {"freq", freq}};
  return c;
}

MetricChart make_flat_torus(const std::map<std::string, double>& params) {
  MetricChart c;
  c.name = "flat_torus";
  c.dim = 2;
  const double L1 = param_or(params, "L1", 1.0);
  const double L2 = param_or(params, "L2", 1.0);
  if (L1 <= 0.0 || L2 <= 0.0) throw GeometryError("flat_torus: periods must be positive");
  c.period = {L1, L2};
  c.periodic = {true, true};
  c.metric = [](const Vec&) { return Mat{{{1.0, 0.0}, {0.0, 1.0}}}; };
  c.metric_deriv = [](const Vec&) { return std::array<Mat, 2>{}; };
  c.params = {{"L1", L1}, {"L2", L2}};
  return c;
}

MetricChart make_wavy_torus(const std::map<std::string, double>& params) {
  MetricChart c;
  c.name = "wavy_torus";
  c.dim = 2;
  const double amp = param_or(params, "amp", 0.5);
  if (std::abs(amp) >= 1.0) throw GeometryError("wavy_torus: |amp| must be < 1");
  c.period = {2.0 * M_PI, 2.0 * M_PI};
  c.periodic = {true, true};
  c.metric = [amp](const Vec& x) {
    const double phi = 1.0 + amp * std::sin(x[0]) * std::sin(x[1]);
    const double p2 = phi * phi;
    return Mat{{{p2, 0.0}, {0.0, p2}}};
  };
  c.metric_deriv = [amp](const Vec& x) {
    const double phi = 1.0 + amp * std::sin(x[0]) * std::sin(x[1]);
    const double d0 = amp * std::cos(x[0]) * std::sin(x[1]);
    const double d1 = amp * std::sin(x[0]) * std::cos(x[1]);
    std::array<Mat, 2> d{};
    d[0][0][0] = d[0][1][1] = 2.0 * phi * d0;
    d[1][0][0] = d[1][1][1] = 2.0 * phi * d1;
    return d;
  };
  c.params = {{"amp", amp}};
  return c;
}

MetricChart make_sphere_band(const std::map<std::string, double>& params) {
  MetricChart c;
  c.name = "sphere_band";
  c.dim = 2;
  const double theta_max = param_or(params, "theta_max", M_PI / 3.0);
  if (theta_max <= 0.0 || theta_max >= 0.5 * M_PI) {
    throw GeometryError("sphere_band: theta_max must lie in (0, pi/2)");
  }
  c.origin = {-theta_max, 0.0};
  c.period = {2.0 * theta_max, 2.0 * M_PI};
  c.periodic = {false, true};
  c.metric = [](const Vec& x) {
    const double ct = std::cos(x[0]);
    return Mat{{{1.0, 0.0}, {0.0, ct * ct}}};
  };
  c.metric_deriv = [](const Vec& x) {
    std::array<Mat, 2> d{};
    d[0][1][1] = -std::sin(2.0 * x[0]);  // d_theta cos^2 theta
    return d;
  };
  c.params = {{"theta_max", theta_max}};
  return c;
}

MetricChart make_schwarzschild_r(const std::map<std::string, double>& params) {
  MetricChart c;
  c.name = "schwarzschild_r";
  c.dim = 1;
  const double m = param_or(params, "m", 1.0);
  const double r0 = param_or(params, "r0", 2.5 * m);
  const double r1 = param_or(params, "r1", 8.0 * m);
  if (m <= 0.0) throw GeometryError("schwarzschild_r: mass must be positive");
  if (r0 <= 2.0 * m || r1 <= r0) {
    throw GeometryError("schwarzschild_r: need 2m < r0 < r1, the chart stops at the horizon");
  }
  c.origin = {r0, 0.0};
  c.period = {r1 - r0, 1.0};
  c.periodic = {false, true};
  c.metric = [m](const Vec& x) {
    const double a = 1.0 - 2.0 * m / x[0];
    return Mat{{{1.0 / a, 0.0}, {0.0, 1.0}}};
  };
  c.metric_deriv = [m](const Vec& x) {
    const double a = 1.0 - 2.0 * m / x[0];
    std::array<Mat, 2> d{};
    d[0][0][0] = -(2.0 * m / (x[0] * x[0])) / (a * a);
    return d;
  };
  c.params = {{"m", m}, {"r0", r0}, {"r1", r1}};
  return c;
}

}  // namespace

MetricChart make_chart(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "flat_circle") return make_flat_circle(params);
  if (name == "weighted_circle") return make_weighted_circle(params);
  if (name == "flat_torus") return make_flat_torus(params);
  if (name == "wavy_torus") return make_wavy_torus(params);
  if (name == "sphere_band") return make_sphere_band(params);
  if (name == "schwarzschild_r") return make_schwarzschild_r(params);
  throw GeometryError("unknown chart '" + name + "'");
}

std::vector<std::string> chart_names() {
  return {"flat_circle", "weighted_circle", "flat_torus",
          "wavy_torus",  "sphere_band",     "schwarzschild_r"};
}

}  // namespace mcl
