#pragma once

#include <functional>
#include <vector>

#include "mcl/flux.hpp"

namespace mcl {

/// 1D problem d_t u + (1/k) d_x (k f(u)) = 0 on the unit circle.
struct WeightedProblem {
  KFunction k;
  ScalarProfile f;
  std::function<double(double)> u0;
  double u_lo = -1.0;  // data range used for the convexity check
  double u_hi = 1.0;
  double t_max = 1.0;  // search horizon for crossing_time
};

/// Throws FluxError unless min k > 0 (256 samples) and f'' >= -1e-9 on
/// [u_lo, u_hi] (central differences at 64 samples).
void validate_problem(const WeightedProblem& problem);

struct Characteristic {
  double y = 0.0;  // foot point
  double c = 0.0;  // conserved k(y) f(u0(y))
  int branch = 1;  // monotone branch of f used for inversion
  std::vector<double> s;       // time grid
  std::vector<double> path;    // X(s), unwrapped to the universal cover
  std::vector<double> values;  // v(s) = f^{-1}_branch(c / k(X))
  double drift = 0.0;          // max_s |k(X) f(v) - c|
  double head() const { return path.back(); }
};

/// Inverse of f on one monotone branch: branch=+1 means u >= minimizer,
/// branch=-1 means u <= minimizer; profiles without interior minimum ignore
/// the sign. Bisection, 60 iterations on an expanding bracket. Throws
/// FluxError "characteristic exits branch" when z < f(minimizer) - 1e-12.
double branch_inverse(const ScalarProfile& f, double z, int branch);

/// Integrates dX/ds = f'(f^{-1}_branch(c / k(X))) with RK4, step ds = 1e-3.
/// branch = 0 picks the branch from the sign of u0(y) against the minimizer.
Characteristic trace_characteristic(const WeightedProblem& problem, double y,
                                    double t_end, int branch = 0);

/// Pre-shock solution at time t on the given grid: solves X(t; y) = x for the
/// foot point y by bisection over 512 traced characteristics (the map
/// y -> X(t; y) is monotone before crossing). Throws SolverError with an
/// estimated crossing time when monotonicity has been lost.
std::vector<double> smooth_solve(const WeightedProblem& problem, double t,
                                 const std::vector<double>& x_grid);

/// Smallest t in (0, t_max] at which adjacent traced characteristics cross
/// (512 foot points, 30 bisection levels in t); +infinity if none by t_max.
double crossing_time(const WeightedProblem& problem);

}  // namespace mcl
