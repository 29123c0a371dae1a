#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mcl/flux.hpp"
#include "mcl/properties.hpp"
#include "mcl/trajectory.hpp"

namespace mcl {

/// Static 1+1 product spacetime: coordinates (t, x), metric
/// g = g00(x) dt^2 + gbar, with g00 < 0 and gbar the Riemannian metric of the
/// 1D leaf chart. Leaves H_t are the constant-t slices.
struct FoliatedSpacetime {
  std::string name;
  MetricChart leaf;
  std::function<double(const Vec&)> g00;
  std::map<std::string, double> params;
};

FoliatedSpacetime make_minkowski_1_1(double length = 1.0);
FoliatedSpacetime make_schwarzschild_radial(double m, double r0, double r1);

/// sqrt(-g00 * g11): the spacetime volume density on a leaf cell.
double spacetime_density(const FoliatedSpacetime& st, const Vec& x);

/// Local outgoing null speed sqrt(-g00 / g11).
double null_speed(const FoliatedSpacetime& st, const Vec& x);

/// Flux (f^0, f^1)(x, u) with u-derivatives. `compatible` records whether
/// d_x (sqrt|g| f^1(., u)) vanishes for frozen u (checked at construction).
struct TimelikeFlux {
  std::string name;
  std::function<double(const Vec&, double)> f0, f1;
  std::function<double(const Vec&, double)> du_f0, du_f1;
  bool compatible = false;
};

/// f = (u, a * null_speed(x) * u): linear transport at fraction `a` of the
/// local outgoing null speed. Time-like iff |a| < 1.
TimelikeFlux make_lorentzian_transport(const FoliatedSpacetime& st, double a);

/// f = (u + b u^3, a * null_speed(x) * u); nonlinear in the time component.
TimelikeFlux make_lorentzian_nonlinear(const FoliatedSpacetime& st, double a, double b);

/// max over x-samples and u in [u_lo, u_hi] of g(d_u f, d_u f); negative
/// means strictly time-like. Throws SolverError when d_u f^0 <= 0 somewhere
/// (the evolution would lose hyperbolicity relative to the foliation).
double check_timelike(const TimelikeFlux& flux, const FoliatedSpacetime& st,
                      double u_lo, double u_hi, int nx = 64, int nu = 9);

/// Schwarzschild exterior components (g_tt, g_rr, g_theta_theta, g_phi_phi)
/// for mass m. Throws GeometryError for r <= 2m (coordinate horizon).
std::array<double, 4> schwarzschild_metric(double m, double r, double theta);

struct LorentzianConfig {
  std::string mode = "advective";  // advective | conservative
  double epsilon = 0.0;
  double cfl = 0.4;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  int snapshots = 11;
  double dt_max = 1.0;
  double dt_override = 0.0;
};

double lorentzian_stable_dt(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                            const TimelikeFlux& flux, double eps, double lo, double hi,
                            double cfl, double dt_max, const std::string& mode);

/// One forward-Euler leaf-to-leaf step. `advective` updates
/// d_u f^0 d_t u + d_u f^1 d_x u = eps gbar^{xx} (d_xx u - Gamma d_x u);
/// `conservative` updates phi = sqrt|g| f^0(u) with central fluxes plus
/// eps d_x(sqrt|g| gbar^{xx} d_x u) and inverts f^0 by bisection.
ScalarField lorentzian_step(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                            const TimelikeFlux& flux, const ScalarField& u, double dt,
                            double eps, const std::string& mode);

SolutionTrajectory solve_lorentzian(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                                    const TimelikeFlux& flux, const ScalarField& u0,
                                    const LorentzianConfig& config);

/// ||f^t(u) - f^t(v)||_{L^1(H_t)} = sum_c vol_c sqrt(-g00) |f^0(u)-f^0(v)|
/// nonincreasing across leaves, relative slack 1e-8.
PropertyReport foliation_contraction_check(const SolutionTrajectory& a,
                                           const SolutionTrajectory& b,
                                           const FoliatedSpacetime& st,
                                           const TimelikeFlux& flux);

/// Weak residual of the leaf entropy inequality
/// d_t(sqrt|g| F^0(u)) + d_x(sqrt|g| F^1(u)) <= 0 (compatible time-like flux,
/// convex U) against the theta basket: Kruzkov quantile pairs + square
/// entropy, initial term included. Passes while the negative part stays
/// within c_cap (dx + dt).
PropertyReport check_lorentzian_entropy(const SolutionTrajectory& traj,
                                        const FoliatedSpacetime& st,
                                        const TimelikeFlux& flux,
                                        unsigned long long seed, double c_cap = 50.0);

/// Least-squares slope of log|characteristic speed| against log(-g00) on a
/// log-spaced radius grid; the horizon test expects 1 within 10%.
double horizon_speed_slope(const FoliatedSpacetime& st, const TimelikeFlux& flux,
                           double u, const std::vector<double>& r_samples);

}  // namespace mcl
