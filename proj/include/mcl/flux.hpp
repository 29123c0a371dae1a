#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcl/mesh.hpp"

namespace mcl {

/// Scalar profile h(u) with derivative. `stationary` lists the zeros of h'
/// (used to split sign-definite integrals exactly); `min_point` is the
/// minimizer when h is convex (branch split for inverse lookups).
struct ScalarProfile {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::vector<double> stationary;
  bool has_min = false;
  double min_point = 0.0;
  /// Optional closed-form branch inverses of h: plus branch u >= min_point.
  std::function<double(double)> inv_plus;
  std::function<double(double)> inv_minus;
};

/// Built-ins: "linear" (u), "burgers" (u^2/2), "cubic" (u^3/3).
ScalarProfile make_profile(const std::string& name);

/// Smooth positive weight k(x) = k0 + k1 sin(2 pi freq x) on the unit circle.
struct KFunction {
  double k0 = 2.0;
  double k1 = 1.0;
  double freq = 1.0;
  double value(double x) const;
  double deriv(double x) const;
  bool is_constant() const { return k1 == 0.0; }
};

/// A u-parametrized flux vector field f_x(u). The separable fast path
/// (f = h(u) * V(x)) is set for every built-in family.
struct FluxFamily {
  std::string name;
  int dim = 1;
  std::function<Vec(const Vec&, double)> evaluate;     // f^j_x(u)
  std::function<Vec(const Vec&, double)> du_evaluate;  // d_u f^j_x(u)
  bool compatible = false;
  double growth_c0 = 0.0;  // |f_x(u)|_g <= c0 (1 + |u|) on the sampled range
  bool separable = false;
  ScalarProfile profile;
  TangentField field;  // V(x) when separable
  bool weighted = false;
  KFunction kfun;  // k(x) when weighted
};

/// Builds f = h(u) V(x) after checking div V = 0 at a 32-per-axis sample grid
/// (tolerance 1e-10). Throws FluxError naming the worst point otherwise.
FluxFamily make_compatible_flux(const MetricChart& chart, const TangentField& V,
                                const ScalarProfile& h, const std::string& name);

/// Flux with contravariant component f(u) on the circle with metric k(x)^2 dx^2,
/// i.e. div f = (1/k) d_x (k f(u)). Compatible only when k is constant.
FluxFamily make_weighted_flux_1d(const KFunction& k, const ScalarProfile& f,
                                 const std::string& name);

/// max over cell centers x u-samples of |div_x f(., u)|.
double verify_compatibility(const FluxFamily& flux, const ManifoldMesh& mesh,
                            const std::vector<double>& u_samples);
std::vector<double> default_u_samples();

/// Entropy pair (U, F) with F_x(u) = \int_0^u U'(w) d_w f_x(w) dw, so F_x(0)=0,
/// except Kruzkov pairs which use the classical closed form (see kruzkov_pair).
struct EntropyPair {
  std::string name;
  std::function<double(double)> U;
  std::function<double(double)> dU;
  std::function<Vec(const Vec&, double)> F;
  int quad_order = 8;
  std::vector<double> kinks;  // integrand kinks (the kappa of a Kruzkov pair)
};

/// Entropy flux by Gauss-Legendre on [0, u], split at the listed kinks.
/// Requires order >= 5; exact for polynomial integrands up to degree 2*order-1.
Vec entropy_flux(const FluxFamily& flux, const std::function<double(double)>& dU,
                 const Vec& x, double u, int order = 8,
                 const std::vector<double>& kinks = {});

EntropyPair make_entropy_pair(const FluxFamily& flux, std::function<double(double)> U,
                              std::function<double(double)> dU, const std::string& name,
                              int order = 8);

/// Kruzkov pair (|u - kappa|, sgn(u - kappa)(f_x(u) - f_x(kappa))), sgn(0) = 0.
/// The flux differs from the integral normalization by the u-independent field
/// sgn(-kappa)(f_x(0) - f_x(kappa)), which drops out of weak-form residuals.
EntropyPair kruzkov_pair(const FluxFamily& flux, double kappa);

/// Square entropy pair U = u^2 with quadrature flux.
EntropyPair square_entropy_pair(const FluxFamily& flux, int order = 8);

/// For the general (non-compatible) entropy inequality: returns F_x(u) and the
/// frozen-state divergence (div F)(u) at x.
std::pair<Vec, double> general_entropy_residual_terms(const MetricChart& chart,
                                                      const FluxFamily& flux,
                                                      const EntropyPair& pair, const Vec& x,
                                                      double u);

}  // namespace mcl
