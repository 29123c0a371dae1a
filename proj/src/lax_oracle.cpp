#include "mcl/lax_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcl/common.hpp"

namespace mcl {

void validate_problem(const WeightedProblem& problem) {
  for (int i = 0; i < 256; ++i) {
    const double x = static_cast<double>(i) / 256.0;
    const double kv = problem.k.value(x);
    if (kv <= 0.0) {
      throw FluxError("weighted problem: k(" + format17(x) + ") = " + format17(kv) +
                      " is not positive");
    }
  }
  if (!(problem.u_hi > problem.u_lo)) {
    throw FluxError("weighted problem: empty data range [" + format17(problem.u_lo) +
                    ", " + format17(problem.u_hi) + "]");
  }
  const double h = 1e-4 * (problem.u_hi - problem.u_lo);
  for (int i = 0; i <= 64; ++i) {
    const double u = problem.u_lo + (problem.u_hi - problem.u_lo) * i / 64.0;
    const double second =
        (problem.f.value(u + h) - 2.0 * problem.f.value(u) + problem.f.value(u - h)) /
        (h * h);
    if (second < -1e-9) {
      throw FluxError("weighted problem: flux profile '" + problem.f.name +
                      "' is not convex at u = " + format17(u) +
                      " (f'' ~ " + format17(second) + ")");
    }
  }
}

namespace {

double bisect_to(const std::function<double(double)>& fv, double a, double b,
                 double z) {
  double fa = fv(a) - z;
  // An exact hit on an endpoint would otherwise be classed as "below" and
  // the loop walks away from the root (z = f at a bracket end happens for
  // data touching the extreme of a sine profile).
  if (fa == 0.0) return a;
  if (fv(b) == z) return b;
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = fv(m) - z;
    if ((fa <= 0.0) == (fm <= 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double branch_inverse(const ScalarProfile& f, double z, int branch) {
  if (!f.has_min) {
    // Globally monotone profile: expand a two-sided bracket around 0.
    double w = 1.0;
    const bool increasing = f.value(1.0) >= f.value(-1.0);
    for (int it = 0; it < 200; ++it) {
      const double lo = -w, hi = w;
      const double flo = f.value(lo), fhi = f.value(hi);
      if ((std::min(flo, fhi) <= z) && (z <= std::max(flo, fhi))) {
        return increasing ? bisect_to(f.value, lo, hi, z) : bisect_to(f.value, hi, lo, z);
      }
      w *= 2.0;
    }
    throw FluxError("branch_inverse: value " + format17(z) +
                    " is out of reach for profile '" + f.name + "'");
  }
  const double m0 = f.min_point;
  const double fmin = f.value(m0);
  if (z < fmin - 1e-12) {
    throw FluxError("characteristic exits branch: requested flux level " + format17(z) +
                    " lies below min f = " + format17(fmin) + " of profile '" + f.name +
                    "'");
  }
  const double zc = std::max(z, fmin);
  double w = 1.0;
  if (branch >= 0) {
    for (int it = 0; it < 200; ++it) {
      if (f.value(m0 + w) >= zc) return bisect_to(f.value, m0, m0 + w, zc);
      w *= 2.0;
    }
  } else {
    for (int it = 0; it < 200; ++it) {
      if (f.value(m0 - w) >= zc) return bisect_to(f.value, m0 - w, m0, zc);
      w *= 2.0;
    }
  }
  throw FluxError("branch_inverse: value " + format17(z) +
                  " is out of reach for profile '" + f.name + "'");
}

namespace {

constexpr double kTraceStep = 1e-3;

int pick_branch(const WeightedProblem& problem, double u0y, int branch) {
  if (branch != 0) return branch > 0 ? 1 : -1;
  if (!problem.f.has_min) return 1;
  return u0y >= problem.f.min_point ? 1 : -1;
}

/// Final position only; no path recording, no validation.
double trace_head_raw(const WeightedProblem& problem, double y, double t_end) {
  const double u0y = problem.u0(y);
  const int br = pick_branch(problem, u0y, 0);
  const double c = problem.k.value(y) * problem.f.value(u0y);
  auto rhs = [&](double X) {
    const double v = branch_inverse(problem.f, c / problem.k.value(X), br);
    return problem.f.deriv(v);
  };
  double X = y;
  double s = 0.0;
  while (s < t_end - 1e-15) {
    const double ds = std::min(kTraceStep, t_end - s);
    const double k1 = rhs(X);
    const double k2 = rhs(X + 0.5 * ds * k1);
    const double k3 = rhs(X + 0.5 * ds * k2);
    const double k4 = rhs(X + ds * k3);
    X += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += ds;
  }
  return X;
}

}  // namespace

Characteristic trace_characteristic(const WeightedProblem& problem, double y,
                                    double t_end, int branch) {
  validate_problem(problem);
  if (t_end < 0.0) throw SolverError("trace_characteristic: negative t_end");
  Characteristic ch;
  ch.y = y;
  const double u0y = problem.u0(y);
  ch.branch = pick_branch(problem, u0y, branch);
  ch.c = problem.k.value(y) * problem.f.value(u0y);
  auto invert = [&](double X) {
    return branch_inverse(problem.f, ch.c / problem.k.value(X), ch.branch);
  };
  auto rhs = [&](double X) { return problem.f.deriv(invert(X)); };
  double X = y;
  double s = 0.0;
  ch.s.push_back(s);
  ch.path.push_back(X);
  ch.values.push_back(invert(X));
  ch.drift = std::abs(problem.k.value(X) * problem.f.value(ch.values.back()) - ch.c);
  while (s < t_end - 1e-15) {
    const double ds = std::min(kTraceStep, t_end - s);
    const double k1 = rhs(X);
    const double k2 = rhs(X + 0.5 * ds * k1);
    const double k3 = rhs(X + 0.5 * ds * k2);
    const double k4 = rhs(X + ds * k3);
    X += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += ds;
    const double v = invert(X);
    ch.s.push_back(s);
    ch.path.push_back(X);
    ch.values.push_back(v);
    ch.drift = std::max(
        ch.drift, std::abs(problem.k.value(X) * problem.f.value(v) - ch.c));
  }
  return ch;
}

namespace {

constexpr int kFeet = 512;

std::vector<double> trace_feet(const WeightedProblem& problem, double t) {
  std::vector<double> heads(kFeet + 1);
  parallel_for(kFeet + 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      heads[j] = trace_head_raw(problem, static_cast<double>(j) / kFeet, t);
    }
  });
  return heads;
}

}  // namespace

std::vector<double> smooth_solve(const WeightedProblem& problem, double t,
                                 const std::vector<double>& x_grid) {
  validate_problem(problem);
  if (t < 0.0) throw SolverError("smooth_solve: negative time");
  std::vector<double> out(x_grid.size());
  if (t == 0.0) {
    for (std::size_t q = 0; q < x_grid.size(); ++q) out[q] = problem.u0(x_grid[q]);
    return out;
  }
  const std::vector<double> heads = trace_feet(problem, t);
  double t_cross = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kFeet; ++j) {
    const double gap = heads[j + 1] - heads[j];
    if (gap <= 0.0) {
      const double dy = 1.0 / kFeet;
      t_cross = std::min(t_cross, t * dy / (dy - gap));
    }
  }
  if (t_cross < std::numeric_limits<double>::infinity()) {
    throw SolverError(
        "smooth_solve: characteristics cross before t = " + format17(t) +
        " (estimated crossing time ~ " + format17(t_cross) +
        "); the explicit formula only covers the pre-shock window");
  }
  const double x0 = heads[0];
  const double span = heads[kFeet] - heads[0];  // one period of the lift
  parallel_for(x_grid.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t q = lo; q < hi; ++q) {
      const double x = x_grid[q];
      const double xl = x - std::floor((x - x0) / span) * span;
      std::size_t j =
          std::upper_bound(heads.begin(), heads.end(), xl) - heads.begin();
      j = std::min<std::size_t>(std::max<std::size_t>(j, 1), kFeet) - 1;
      double ya = static_cast<double>(j) / kFeet;
      double yb = static_cast<double>(j + 1) / kFeet;
      double ha = heads[j] - xl;
      for (int it = 0; it < 44; ++it) {
        const double ym = 0.5 * (ya + yb);
        const double hm = trace_head_raw(problem, ym, t) - xl;
        if ((ha <= 0.0) == (hm <= 0.0)) {
          ya = ym;
          ha = hm;
        } else {
          yb = ym;
        }
      }
      const double y = 0.5 * (ya + yb);
      const double u0y = problem.u0(y);
      const int br = pick_branch(problem, u0y, 0);
      const double c = problem.k.value(y) * problem.f.value(u0y);
      out[q] = branch_inverse(problem.f, c / problem.k.value(x), br);
    }
  });
  return out;
}

double crossing_time(const WeightedProblem& problem) {
  validate_problem(problem);
  auto min_gap = [&](double t) {
    const std::vector<double> heads = trace_feet(problem, t);
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kFeet; ++j) m = std::min(m, heads[j + 1] - heads[j]);
    return m;
  };
  if (min_gap(problem.t_max) > 0.0) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = problem.t_max;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mcl
