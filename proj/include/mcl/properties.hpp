#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mcl/flux.hpp"
#include "mcl/trajectory.hpp"

namespace mcl {

/// Outcome of one structural property check. pass <=> margin >= -tolerance.
/// Checks that do not apply to a run (e.g. L^p stability on a non-compatible
/// flux) come back with applicable = false and pass = true.
struct PropertyReport {
  std::string property;
  bool applicable = true;
  bool pass = true;
  double margin = 0.0;
  double tolerance = 0.0;
  std::string location;
  std::string note;
};

/// One nonnegative space-time test function theta(t, x) with derivatives.
struct ThetaMember {
  std::string name;
  std::function<double(double, const Vec&)> value;
  std::function<double(double, const Vec&)> dt;
  std::function<Vec(double, const Vec&)> grad;  // coordinate derivatives
};

/// Deterministic 9-member basket: time windows {T, T/2, T/4} crossed with
/// {constant 1, two randomly centered tensor bumps of radius 0.3 period}.
/// Every member vanishes at t = T and has theta(0, .) > 0 somewhere.
std::vector<ThetaMember> make_theta_basket(const ManifoldMesh& mesh, double t_end,
                                           unsigned long long seed);

bool is_viscous_run(const SolutionTrajectory& traj);

/// Geometric source term of the entropy balance at frozen state u:
/// (div F)(u) - U'(u) (div f)(u); zero for compatible fluxes, closed form
/// (k'/k) (F - U'(u) f) for the weighted 1D family, frozen-state finite
/// differences otherwise.
double entropy_source(const MetricChart& chart, const FluxFamily& flux,
                      const EntropyPair& pair, const Vec& x, double u);

/// L^1/L^2/L^inf nonincreasing over every snapshot pair. Relative slack
/// 1e-10 (FV) or 1e-8 (viscous). Not applicable to non-compatible fluxes.
PropertyReport check_lp_stability(const SolutionTrajectory& traj, const FluxFamily& flux);

/// ||v - u||_1 (volume weighted) nonincreasing over every snapshot pair.
/// Relative slack 1e-12 (FV) or 1e-8 (viscous). Throws on mismatched runs.
PropertyReport check_contraction(const SolutionTrajectory& a, const SolutionTrajectory& b);

/// Weak residual of d_t|v-u| + div(sgn(v-u)(f(v)-f(u))) <= 0 against the
/// theta basket; the geometric sources cancel in the difference form.
PropertyReport check_kruzkov_inequality(const SolutionTrajectory& a,
                                        const SolutionTrajectory& b,
                                        const FluxFamily& flux,
                                        unsigned long long seed);

/// Fits the smallest C1 >= 0 with TV(u(t)) <= e^(C1 t) (1 + TV(u0)).
/// Asserts C1 <= 0.01 on flat 1D compatible runs; reported otherwise.
PropertyReport check_tv_envelope(const SolutionTrajectory& traj, const FluxFamily& flux,
                                 double* c1_fit = nullptr);

/// ||u(t) - u(t')||_1 <= 1.1 TV(u0) |t - t'| over every snapshot pair.
PropertyReport check_time_lipschitz(const SolutionTrajectory& traj,
                                    const FluxFamily& flux);

/// min u0 <= u <= max u0 with round-off slack 1e-13 (FV) / 1e-12 (viscous)
/// times max(1, |u0|_inf). Not applicable to non-compatible fluxes.
PropertyReport check_max_principle(const SolutionTrajectory& traj,
                                   const FluxFamily& flux);

/// sum vol u constant to 1e-12 relative; applies to FV and conservative
/// viscous runs.
PropertyReport check_mass_conservation(const SolutionTrajectory& traj);

/// Entropy drift dichotomy on a smooth window: the compatible flux must hold
/// |dE/dt| <= bound_compatible while the general (nonconstant k) flux
/// produces |dE/dt| >= 10x the compatible drift. Both sides run the central
/// zero-diffusion stepper (advective for the compatible flux, conservative
/// for the general one) with the given fixed dt; E(t) = sum vol U(u(t)).
struct DichotomyResult {
  double drift_compatible = 0.0;
  double drift_general = 0.0;
  double ratio = 0.0;
  PropertyReport report;
};
DichotomyResult check_smooth_entropy_dichotomy(
    const ManifoldMesh& mesh_compatible, const FluxFamily& flux_compatible,
    const std::vector<double>& u0_compatible, const ManifoldMesh& mesh_general,
    const FluxFamily& flux_general, const std::vector<double>& u0_general,
    const EntropyPair& pair, double window, double dt,
    double bound_compatible = 1e-4);

/// Full weak form of the entropy inequality (initial term included) for a
/// 7-quantile Kruzkov basket plus the square entropy, against the theta
/// basket. Passes when the negative part stays within c_cap * (dx + dt).
PropertyReport check_weak_entropy_solution(const SolutionTrajectory& traj,
                                           const FluxFamily& flux,
                                           unsigned long long seed,
                                           double c_cap = 50.0);

/// C = max(0, -worst residual) / (dx + dt) over the same basket as
/// check_weak_entropy_solution; the refinement study quantity.
double entropy_rate_constant(const SolutionTrajectory& traj, const FluxFamily& flux,
                             unsigned long long seed);

/// reports.csv (machine) and reports.txt (aligned table) under dir.
void write_property_reports(const std::filesystem::path& dir,
                            const std::vector<PropertyReport>& reports);

}  // namespace mcl
