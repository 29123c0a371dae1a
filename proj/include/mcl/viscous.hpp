#pragma once

#include "mcl/flux.hpp"
#include "mcl/trajectory.hpp"

namespace mcl {

struct ViscousConfig {
  double epsilon = 0.01;
  std::string form = "auto";  // auto | advective | conservative
  double cfl = 0.2;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  int snapshots = 11;
  double dt_max = 1.0;
  double dt_override = 0.0;
  double range_inflation = 1.0;
  bool mollify_initial = false;
};

/// Discrete Gaussian smoothing, stddev 2*dx per axis, support +-6 cells,
/// weights renormalized (also at band edges).
ScalarField mollify(const ManifoldMesh& mesh, const ScalarField& u);

/// cfl * min(dx_min / lambda_max, dx_min^2 / (2 dim eps Lambda_max), dt_max)
/// with lambda_max the metric norm of du f over cells x [lo, hi] and
/// Lambda_max the largest eigenvalue of the inverse metric over cells.
double viscous_stable_dt(const ManifoldMesh& mesh, const FluxFamily& flux, double eps,
                         double lo, double hi, double cfl, double dt_max);

/// Smallest epsilon that keeps forward Euler central differences monotone:
/// lambda_max * dx_max / 2.
double peclet_epsilon_floor(const ManifoldMesh& mesh, const FluxFamily& flux, double lo,
                            double hi);

/// Advective form, valid when the flux is geometry compatible:
/// u_t = -du f^j d_j u + eps Lap_g u.
ScalarField viscous_step_advective(const ManifoldMesh& mesh, const FluxFamily& flux,
                                   const ScalarField& u, double eps, double dt);

/// Conservative form for general fluxes:
/// u_t = -(1/sqrt g) d_j(sqrt g f^j) + eps (1/sqrt g) d_j(sqrt g g^{jk} d_k u).
ScalarField viscous_step_conservative(const ManifoldMesh& mesh, const FluxFamily& flux,
                                      const ScalarField& u, double eps, double dt);

SolutionTrajectory solve_viscous(const ManifoldMesh& mesh, const FluxFamily& flux,
                                 const ScalarField& u0, const ViscousConfig& config);

/// Viscosity ladder for vanishing-viscosity studies: {4, 2, 1, 0.5} * dx.
std::vector<double> epsilon_schedule(double dx);

/// Integral of U(u) dV over the mesh (midpoint).
double entropy_integral(const ManifoldMesh& mesh, const EntropyPair& pair,
                        const ScalarField& u);

/// eps * sum_c vol_c U''(u_c) |grad u|_g^2 with central gradients; the decay
/// rate of the entropy integral for compatible fluxes.
double entropy_dissipation(const ManifoldMesh& mesh, const EntropyPair& pair,
                           const ScalarField& u, double eps);

}  // namespace mcl
