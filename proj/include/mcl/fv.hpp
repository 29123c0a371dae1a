#pragma once

#include "mcl/flux.hpp"
#include "mcl/trajectory.hpp"

namespace mcl {

struct FVConfig {
  std::string numerical_flux = "rusanov";  // rusanov | engquist_osher
  double cfl = 0.4;                        // cfl <= 0.5 keeps 2D Rusanov monotone
  double t_end = 0.0;
  std::vector<double> snapshot_times;  // must start at 0; default linspace
  int snapshots = 11;
  double dt_override = 0.0;      // > 0 forces a shared step size (paired runs)
  double range_inflation = 1.0;  // widen the assumed state range (weighted runs)
};

/// g(f_x(u), nu) at a face.
double normal_flux(const FluxFamily& flux, const Face& face, const MetricChart& chart,
                   double u);

/// Rusanov two-point flux on a scalar normal flux fn: lambda must dominate
/// |fn'| on the [uL, uR] hull.
double interface_flux_rusanov(const std::function<double(double)>& fn, double uL, double uR,
                              double lambda);

/// Engquist-Osher: q = (fn(uL) + fn(uR))/2 - (1/2) \int_{uL}^{uR} |fn'|.
/// The oriented integral is evaluated exactly by splitting at the stationary
/// points of fn, where |fn'| integrates to |fn jumps|.
double interface_flux_engquist_osher(const std::function<double(double)>& fn, double uL,
                                     double uR, const std::vector<double>& stationary);

/// One forward-Euler conservative update. Throws SolverError when dt violates
/// the monotonicity bound dt * sum(area * lambda) / vol <= 1.
ScalarField fv_step(const ManifoldMesh& mesh, const FluxFamily& flux, const ScalarField& u,
                    double dt, const std::string& numerical_flux = "rusanov");

/// cfl * min_i vol_i / sum_faces(area * lambda) with lambda over [lo, hi].
double fv_stable_dt(const ManifoldMesh& mesh, const FluxFamily& flux, double lo, double hi,
                    double cfl, const std::string& numerical_flux = "rusanov");

SolutionTrajectory solve_fv(const ManifoldMesh& mesh, const FluxFamily& flux,
                            const ScalarField& u0, const FVConfig& config);

std::vector<double> make_snapshot_times(const FVConfig& config);

}  // namespace mcl
