#include "mcl/flux.hpp"

#include <algorithm>
#include <cmath>

#include "mcl/numerics.hpp"

namespace mcl {

ScalarProfile make_profile(const std::string& name) {
  ScalarProfile p;
  p.name = name;
  if (name == "linear") {
    p.value = [](double u) { return u; };
    p.deriv = [](double) { return 1.0; };
    p.has_min = false;
    p.inv_plus = [](double z) { return z; };
    p.inv_minus = [](double z) { return z; };
    return p;
  }
  if (name == "burgers") {
    p.value = [](double u) { return 0.5 * u * u; };
    p.deriv = [](double u) { return u; };
    p.stationary = {0.0};
    p.has_min = true;
    p.min_point = 0.0;
    p.inv_plus = [](double z) { return std::sqrt(std::max(0.0, 2.0 * z)); };
    p.inv_minus = [](double z) { return -std::sqrt(std::max(0.0, 2.0 * z)); };
    return p;
  }
  if (name == "cubic") {
    p.value = [](double u) { return u * u * u / 3.0; };
    p.deriv = [](double u) { return u * u; };
    p.stationary = {0.0};
    p.has_min = false;
    p.inv_plus = [](double z) { return std::cbrt(3.0 * z); };
    p.inv_minus = [](double z) { return std::cbrt(3.0 * z); };
    return p;
  }
  throw FluxError("unknown scalar profile '" + name + "'");
}

double KFunction::value(double x) const { return k0 + k1 * std::sin(2.0 * M_PI * freq * x); }

double KFunction::deriv(double x) const {
  return k1 * 2.0 * M_PI * freq * std::cos(2.0 * M_PI * freq * x);
}

namespace {

double metric_norm(const MetricChart& chart, const Vec& x, const Vec& v) {
  const Mat g = metric_at(chart, x);
  double s = 0.0;
  for (int i = 0; i < chart.dim; ++i)
    for (int j = 0; j < chart.dim; ++j) s += g[i][j] * v[i] * v[j];
  return std::sqrt(std::max(0.0, s));
}

/// Growth constant fitted on the sampled range, |f|_g <= c0 (1 + |u|).
double fit_growth_constant(const MetricChart& chart, const FluxFamily& flux) {
  double c0 = 0.0;
  const int nx = 16;
  for (double u : default_u_samples()) {
    for (int j = 0; j < (chart.dim == 2 ? nx : 1); ++j) {
      for (int i = 0; i < nx; ++i) {
        const Vec x{chart.origin[0] + (i + 0.5) / nx * chart.period[0],
                    chart.dim == 2 ? chart.origin[1] + (j + 0.5) / nx * chart.period[1] : 0.0};
        const double mag = metric_norm(chart, x, flux.evaluate(x, u));
        c0 = std::max(c0, mag / (1.0 + std::abs(u)));
      }
    }
  }
  return c0 * 1.02;
}

}  // namespace

std::vector<double> default_u_samples() {
  return {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
}

FluxFamily make_compatible_flux(const MetricChart& chart, const TangentField& V,
                                const ScalarProfile& h, const std::string& name) {
  // Reject fields that are not divergence free before they can poison the
  // downstream stability checks.
  const int nx = 32;
  double worst = 0.0;
  Vec worst_at{0.0, 0.0};
  for (int j = 0; j < (chart.dim == 2 ? nx : 1); ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec x{chart.origin[0] + (i + 0.5) / nx * chart.period[0],
                  chart.dim == 2 ? chart.origin[1] + (j + 0.5) / nx * chart.period[1] : 0.0};
      const double d = std::abs(divergence(chart, V, x));
      if (d > worst) {
        worst = d;
        worst_at = x;
      }
    }
  }
  if (worst > 1e-10) {
    throw FluxError("make_compatible_flux('" + name + "'): div V = " + format17(worst) +
                    " at (" + format17(worst_at[0]) + ", " + format17(worst_at[1]) +
                    "), field is not divergence free");
  }

  FluxFamily flux;
  flux.name = name;
  flux.dim = chart.dim;
  flux.compatible = true;
  flux.separable = true;
  flux.profile = h;
  flux.field = V;
  flux.evaluate = [V, h](const Vec& x, double u) {
    const Vec v = V(x);
    const double s = h.value(u);
    return Vec{s * v[0], s * v[1]};
  };
  flux.du_evaluate = [V, h](const Vec& x, double u) {
    const Vec v = V(x);
    const double s = h.deriv(u);
    return Vec{s * v[0], s * v[1]};
  };
  flux.growth_c0 = fit_growth_constant(chart, flux);
  return flux;
}

FluxFamily make_weighted_flux_1d(const KFunction& k, const ScalarProfile& f,
                                 const std::string& name) {
  // k enters through the metric k^2 dx^2; the contravariant component is f(u).
  const int nx = 64;
  for (int i = 0; i <= nx; ++i) {
    const double kv = k.value(static_cast<double>(i) / nx);
    if (kv <= 0.0) {
      throw FluxError("make_weighted_flux_1d('" + name + "'): k(" +
                      format17(static_cast<double>(i) / nx) + ") = " + format17(kv) +
                      " is not positive");
    }
  }
  FluxFamily flux;
  flux.name = name;
  flux.dim = 1;
  flux.compatible = k.is_constant();
  flux.separable = true;
  flux.profile = f;
  flux.field = [](const Vec&) { return Vec{1.0, 0.0}; };
  flux.weighted = true;
  flux.kfun = k;
  flux.evaluate = [f](const Vec&, double u) { return Vec{f.value(u), 0.0}; };
  flux.du_evaluate = [f](const Vec&, double u) { return Vec{f.deriv(u), 0.0}; };
  const MetricChart chart =
      make_chart("weighted_circle", {{"k0", k.k0}, {"k1", k.k1}, {"freq", k.freq}});
  flux.growth_c0 = fit_growth_constant(chart, flux);
  return flux;
}

double verify_compatibility(const FluxFamily& flux, const ManifoldMesh& mesh,
                            const std::vector<double>& u_samples) {
  double worst = 0.0;
  for (double u : u_samples) {
    TangentField frozen = [&flux, u](const Vec& x) { return flux.evaluate(x, u); };
    for (const Cell& cell : mesh.cells) {
      worst = std::max(worst, std::abs(divergence(mesh.chart, frozen, cell.center)));
    }
  }
  return worst;
}

Vec entropy_flux(const FluxFamily& flux, const std::function<double(double)>& dU, const Vec& x,
                 double u, int order, const std::vector<double>& kinks) {
  if (order < 5) throw FluxError("entropy_flux: quadrature order must be >= 5");
  // Integrate dU(w) d_w f_x(w) over [0, u], splitting panels at interior kinks
  // so each panel sees a smooth integrand.
  std::vector<double> pts{0.0, u};
  const double lo = std::min(0.0, u), hi = std::max(0.0, u);
  for (double kink : kinks) {
    if (kink > lo && kink < hi) pts.push_back(kink);
  }
  std::sort(pts.begin(), pts.end());
  if (u < 0.0) std::reverse(pts.begin(), pts.end());

  const Quadrature& q = gauss_legendre(order);
  Vec acc{0.0, 0.0};
  for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
    const double a = pts[seg], b = pts[seg + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      const double w = mid + half * q.nodes[i];
      const Vec df = flux.du_evaluate(x, w);
      const double scale = q.weights[i] * half * dU(w);
      acc[0] += scale * df[0];
      acc[1] += scale * df[1];
    }
  }
  return acc;
}

EntropyPair make_entropy_pair(const FluxFamily& flux, std::function<double(double)> U,
                              std::function<double(double)> dU, const std::string& name,
                              int order) {
  EntropyPair pair;
  pair.name = name;
  pair.U = std::move(U);
  pair.dU = std::move(dU);
  pair.quad_order = order;
  auto dU_copy = pair.dU;
  pair.F = [flux, dU_copy, order](const Vec& x, double u) {
    return entropy_flux(flux, dU_copy, x, u, order);
  };
  return pair;
}

EntropyPair kruzkov_pair(const FluxFamily& flux, double kappa) {
  EntropyPair pair;
  pair.name = "kruzkov(" + format17(kappa) + ")";
  pair.kinks = {kappa};
  pair.U = [kappa](double u) { return std::abs(u - kappa); };
  pair.dU = [kappa](double u) {
    if (u > kappa) return 1.0;
    if (u < kappa) return -1.0;
    return 0.0;  // sgn(0) = 0
  };
  pair.F = [flux, kappa](const Vec& x, double u) {
    const double s = u > kappa ? 1.0 : (u < kappa ? -1.0 : 0.0);
    const Vec fu = flux.evaluate(x, u);
    const Vec fk = flux.evaluate(x, kappa);
    return Vec{s * (fu[0] - fk[0]), s * (fu[1] - fk[1])};
  };
  return pair;
}

EntropyPair square_entropy_pair(const FluxFamily& flux, int order) {
  return make_entropy_pair(
      flux, [](double u) { return u * u; }, [](double u) { return 2.0 * u; }, "square", order);
}

std::pair<Vec, double> general_entropy_residual_terms(const MetricChart& chart,
                                                      const FluxFamily& /*flux*/,
                                                      const EntropyPair& pair, const Vec& x,
                                                      double u) {
  const Vec F = pair.F(x, u);
  TangentField frozen = [&pair, u](const Vec& y) { return pair.F(y, u); };
  const double divF = divergence(chart, frozen, x);
  return {F, divF};
}

}  // namespace mcl
