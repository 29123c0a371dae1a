#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mcl/common.hpp"

namespace mcl {

/// Contravariant vector field given in chart coordinates.
using TangentField = std::function<Vec(const Vec&)>;
using ScalarFn = std::function<double(const Vec&)>;

/// A single coordinate chart with a Riemannian metric. Charts are rectangles
/// [origin, origin + period) per axis; an axis is either periodic (circle
/// direction) or a bounded band direction.
struct MetricChart {
  std::string name;
  int dim = 1;
  std::function<Mat(const Vec&)> metric;  // g_ij, symmetric positive definite
  /// Analytic partial derivatives d[k] = d_k g_ij. Empty target means the
  /// derivatives are formed by central differences with step 1e-5 * period.
  std::function<std::array<Mat, 2>(const Vec&)> metric_deriv;
  Vec origin{0.0, 0.0};
  Vec period{1.0, 1.0};  // axis extent (also the length scale for FD steps)
  std::array<bool, 2> periodic{true, true};
  std::map<std::string, double> params;
};

/// Gamma^i_{kj}, symmetric in (k, j).
struct ChristoffelSymbols {
  double g[2][2][2] = {};
  double at(int i, int k, int j) const { return g[i][k][j]; }
};

double metric_det(const Mat& g, int dim);
Mat metric_inverse(const Mat& g, int dim);

/// Evaluates g at x and validates positive definiteness.
Mat metric_at(const MetricChart& chart, const Vec& x);
double sqrt_det_metric(const MetricChart& chart, const Vec& x);
std::array<Mat, 2> metric_derivatives(const MetricChart& chart, const Vec& x);

/// Gamma^i_{kj} = 1/2 g^{il} (d_k g_{lj} + d_j g_{kl} - d_l g_{kj}).
ChristoffelSymbols christoffel(const MetricChart& chart, const Vec& x);

/// Divergence in density form, (1/sqrt|g|) d_j (sqrt|g| X^j).
/// X-derivatives use central differences with step step_rel * period.
double divergence(const MetricChart& chart, const TangentField& X, const Vec& x,
                  double step_rel = 1e-5);

/// Divergence in connection form, d_j X^j + Gamma^j_{kj} X^k. Agrees with the
/// density form to O(h^2); the pair is the discretization cross-check.
double divergence_christoffel(const MetricChart& chart, const TangentField& X, const Vec& x,
                              double step_rel = 1e-5);

/// grad h = g^{ij} d_j h (contravariant components).
Vec gradient(const MetricChart& chart, const ScalarFn& h, const Vec& x,
             double step_rel = 1e-5);

/// Laplace-Beltrami via g^{ij} (d_i d_j h - Gamma^k_{ij} d_k h).
double laplace_beltrami(const MetricChart& chart, const ScalarFn& h, const Vec& x,
                        double step_rel = 1e-4);

/// \int fn dV_g over the whole chart rectangle, tensor Gauss panels.
double integrate(const MetricChart& chart, const ScalarFn& fn, int panels_per_axis = 64,
                 int gauss_order = 4);

/// Built-in charts:
///   flat_circle(L)                unit-speed circle, g = 1
///   weighted_circle(k0,k1,freq)   g = k(x)^2 with k = k0 + k1 sin(2 pi freq x)
///   flat_torus(L1,L2)             identity metric on a periodic rectangle
///   wavy_torus(amp)               conformal (1 + amp sin x1 sin x2)^2 I on [0,2pi)^2
///   sphere_band(theta_max)        diag(1, cos^2 theta), theta in [-theta_max, theta_max]
///   schwarzschild_r(m,r0,r1)      leaf metric 1/(1 - 2m/r) on [r0, r1]
MetricChart make_chart(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> chart_names();

}  // namespace mcl
