#include "mcl/lorentzian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "mcl/mesh.hpp"
#include "mcl/numerics.hpp"

namespace mcl {

namespace {

double leaf_g11(const FoliatedSpacetime& st, const Vec& x) {
  return metric_at(st.leaf, x)[0][0];
}

// d_x (sqrt|g| f^1(., ubar)) == 0 for frozen ubar, sampled across the leaf.
bool frozen_flux_compatible(const FoliatedSpacetime& st,
                            const std::function<double(const Vec&, double)>& f1) {
  const double L = st.leaf.period[0];
  const double x0 = st.leaf.origin[0];
  const double h = 1e-4 * L;
  for (double ubar : {0.37, -0.81}) {
    for (int i = 0; i < 33; ++i) {
      double x = x0 + L * (i + 0.5) / 33.0;
      Vec xl{x - h, 0.0}, xr{x + h, 0.0};
      double pl = spacetime_density(st, xl) * f1(xl, ubar);
      double pr = spacetime_density(st, xr) * f1(xr, ubar);
      double scale = std::max(1.0, std::max(std::abs(pl), std::abs(pr))) / L;
      if (std::abs(pr - pl) / (2.0 * h) > 1e-10 * scale * L) return false;
    }
  }
  return true;
}

}  // namespace

FoliatedSpacetime make_minkowski_1_1(double length) {
  if (length <= 0.0) throw GeometryError("minkowski_1_1: length must be positive");
  FoliatedSpacetime st;
  st.name = "minkowski_1_1";
  st.leaf = make_chart("flat_circle", {{"L", length}});
  st.g00 = [](const Vec&) { return -1.0; };
  st.params = {{"L", length}};
  return st;
}

FoliatedSpacetime make_schwarzschild_radial(double m, double r0, double r1) {
  FoliatedSpacetime st;
  st.name = "schwarzschild_radial";
  st.leaf = make_chart("schwarzschild_r", {{"m", m}, {"r0", r0}, {"r1", r1}});
  st.g00 = [m](const Vec& x) { return -(1.0 - 2.0 * m / x[0]); };
  st.params = {{"m", m}, {"r0", r0}, {"r1", r1}};
  return st;
}

double spacetime_density(const FoliatedSpacetime& st, const Vec& x) {
  return std::sqrt(std::max(0.0, -st.g00(x) * leaf_g11(st, x)));
}

double null_speed(const FoliatedSpacetime& st, const Vec& x) {
  return std::sqrt(std::max(0.0, -st.g00(x) / leaf_g11(st, x)));
}

TimelikeFlux make_lorentzian_transport(const FoliatedSpacetime& st, double a) {
  TimelikeFlux fl;
  fl.name = "lorentzian_transport";
  auto cn = [st](const Vec& x) { return null_speed(st, x); };
  fl.f0 = [](const Vec&, double u) { return u; };
  fl.du_f0 = [](const Vec&, double) { return 1.0; };
  fl.f1 = [cn, a](const Vec& x, double u) { return a * cn(x) * u; };
  fl.du_f1 = [cn, a](const Vec& x, double) { return a * cn(x); };
  fl.compatible = frozen_flux_compatible(st, fl.f1);
  return fl;
}

TimelikeFlux make_lorentzian_nonlinear(const FoliatedSpacetime& st, double a, double b) {
  if (b < 0.0) throw FluxError("lorentzian_nonlinear: cubic weight must be nonnegative");
  TimelikeFlux fl;
  fl.name = "lorentzian_nonlinear";
  auto cn = [st](const Vec& x) { return null_speed(st, x); };
  fl.f0 = [b](const Vec&, double u) { return u + b * u * u * u; };
  fl.du_f0 = [b](const Vec&, double u) { return 1.0 + 3.0 * b * u * u; };
  fl.f1 = [cn, a](const Vec& x, double u) { return a * cn(x) * u; };
  fl.du_f1 = [cn, a](const Vec& x, double) { return a * cn(x); };
  fl.compatible = frozen_flux_compatible(st, fl.f1);
  return fl;
}

double check_timelike(const TimelikeFlux& flux, const FoliatedSpacetime& st,
                      double u_lo, double u_hi, int nx, int nu) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i) {
    Vec x{st.leaf.origin[0] + st.leaf.period[0] * (i + 0.5) / nx, 0.0};
    const double g00 = st.g00(x);
    const double g11 = leaf_g11(st, x);
    for (int s = 0; s < nu; ++s) {
      double u = nu > 1 ? u_lo + (u_hi - u_lo) * s / (nu - 1) : u_lo;
      double a0 = flux.du_f0(x, u);
      double a1 = flux.du_f1(x, u);
      if (a0 <= 0.0)
        throw SolverError("time-like check: d_u f^0 must stay positive, got " +
                          format17(a0) + " at u = " + format17(u));
      worst = std::max(worst, g00 * a0 * a0 + g11 * a1 * a1);
    }
  }
  return worst;
}

std::array<double, 4> schwarzschild_metric(double m, double r, double theta) {
  if (m < 0.0) throw GeometryError("schwarzschild_metric: mass must be nonnegative");
  if (r <= 0.0) throw GeometryError("schwarzschild_metric: r must be positive");
  if (m > 0.0 && r <= 2.0 * m)
    throw GeometryError(
        "schwarzschild_metric: r <= 2m hits the coordinate singularity of the "
        "static chart; this exterior chart stops at the horizon");
  const double a = 1.0 - 2.0 * m / r;
  const double s = std::sin(theta);
  return {-a, 1.0 / a, r * r, r * r * s * s};
}

double lorentzian_stable_dt(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                            const TimelikeFlux& flux, double eps, double lo, double hi,
                            double cfl, double dt_max, const std::string& mode) {
  double lam = 0.0, nu_adv = 0.0, min_phi_u = std::numeric_limits<double>::infinity(),
         max_d = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Vec& x = mesh.cells[c].center;
    const double dens = spacetime_density(st, x);
    const double ginv = mesh.geom[c].ginv[0][0];
    max_d = std::max(max_d, dens * ginv);
    for (int s = 0; s < 9; ++s) {
      double u = lo + (hi - lo) * s / 8.0;
      double a0 = flux.du_f0(x, u);
      double a1 = flux.du_f1(x, u);
      if (a0 <= 0.0)
        throw SolverError("lorentzian_stable_dt: d_u f^0 must stay positive");
      lam = std::max(lam, std::abs(a1 / a0));
      nu_adv = std::max(nu_adv, ginv / a0);
      min_phi_u = std::min(min_phi_u, dens * a0);
    }
  }
  const double dx = mesh.dx[0];
  double dt = dt_max;
  if (lam > 0.0) dt = std::min(dt, dx / lam);
  if (eps > 0.0) {
    if (mode == "advective") {
      if (nu_adv > 0.0) dt = std::min(dt, dx * dx / (2.0 * eps * nu_adv));
    } else if (max_d > 0.0) {
      dt = std::min(dt, dx * dx * min_phi_u / (2.0 * eps * max_d));
    }
  }
  return cfl * dt;
}

namespace {

// f^0(x, .) is strictly increasing; invert by expanding bracket + bisection
// so every run reproduces bit for bit.
double invert_f0(const TimelikeFlux& flux, const Vec& x, double target, double guess) {
  double w = 1.0;
  double lo = guess - w, hi = guess + w;
  int guard = 0;
  while (flux.f0(x, lo) > target && guard++ < 200) { w *= 2.0; lo = guess - w; }
  guard = 0;
  while (flux.f0(x, hi) < target && guard++ < 200) { w *= 2.0; hi = guess + w; }
  if (flux.f0(x, lo) > target || flux.f0(x, hi) < target)
    throw SolverError("conservative leaf update could not bracket f^0 level " +
                      format17(target));
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (flux.f0(x, mid) <= target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

ScalarField step_advective(const ManifoldMesh& mesh, const FoliatedSpacetime&,
                           const TimelikeFlux& flux, const ScalarField& u, double dt,
                           double eps) {
  ScalarField out = u;
  const double dx = mesh.dx[0];
  const int n = mesh.cell_count();
  for (int c = 0; c < n; ++c) {
    const Vec& x = mesh.cells[c].center;
    double uc = u.values[c];
    double a0 = flux.du_f0(x, uc);
    if (a0 <= 0.0)
      throw SolverError("lorentzian advective step: d_u f^0 turned nonpositive at x = " +
                        format17(x[0]));
    double a1 = flux.du_f1(x, uc);
    int ip = mesh.neighbor(c, 0, +1);
    int im = mesh.neighbor(c, 0, -1);
    double up = ip >= 0 ? u.values[ip] : uc;
    double um = im >= 0 ? u.values[im] : uc;
    double d1 = (up - um) / (2.0 * dx);
    double d2 = (up - 2.0 * uc + um) / (dx * dx);
    double lap = 0.0;
    if (eps > 0.0) {
      const CellGeometry& gc = mesh.geom[c];
      lap = gc.ginv[0][0] * (d2 - gc.gamma.at(0, 0, 0) * d1);
    }
    out.values[c] = uc + dt * (-a1 * d1 + eps * lap) / a0;
  }
  return out;
}

ScalarField step_conservative(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                              const TimelikeFlux& flux, const ScalarField& u, double dt,
                              double eps) {
  const int n = mesh.cell_count();
  const double dx = mesh.dx[0];
  const bool periodic = mesh.chart.periodic[0];
  std::vector<double> dens(n), phi(n), f1v(n), dco(n);
  for (int c = 0; c < n; ++c) {
    const Vec& x = mesh.cells[c].center;
    dens[c] = spacetime_density(st, x);
    phi[c] = dens[c] * flux.f0(x, u.values[c]);
    f1v[c] = dens[c] * flux.f1(x, u.values[c]);
    dco[c] = dens[c] * mesh.geom[c].ginv[0][0];
  }
  // face f sits between cells f-1 and f; boundary faces carry zero flux.
  std::vector<double> h(n + 1, 0.0);
  for (int f = 0; f <= n; ++f) {
    if (!periodic && (f == 0 || f == n)) continue;
    int cl = f == 0 ? n - 1 : f - 1;
    int cr = f == n ? 0 : f;
    double g = 0.5 * (f1v[cl] + f1v[cr]);
    if (eps > 0.0)
      g -= eps * 0.5 * (dco[cl] + dco[cr]) * (u.values[cr] - u.values[cl]) / dx;
    h[f] = g;
  }
  ScalarField out = u;
  for (int c = 0; c < n; ++c) {
    double phin = phi[c] - dt / dx * (h[c + 1] - h[c]);
    out.values[c] = invert_f0(flux, mesh.cells[c].center, phin / dens[c], u.values[c]);
  }
  return out;
}

}  // namespace

ScalarField lorentzian_step(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                            const TimelikeFlux& flux, const ScalarField& u, double dt,
                            double eps, const std::string& mode) {
  if (mesh.dim() != 1)
    throw SolverError("lorentzian_step: the 1+1 evolution needs a 1D leaf mesh");
  if (mode == "advective") return step_advective(mesh, st, flux, u, dt, eps);
  if (mode == "conservative") return step_conservative(mesh, st, flux, u, dt, eps);
  throw SolverError("unknown lorentzian mode: " + mode);
}

SolutionTrajectory solve_lorentzian(const ManifoldMesh& mesh, const FoliatedSpacetime& st,
                                    const TimelikeFlux& flux, const ScalarField& u0,
                                    const LorentzianConfig& config) {
  if (config.mode != "advective" && config.mode != "conservative")
    throw SolverError("unknown lorentzian mode: " + config.mode);
  if (mesh.dim() != 1)
    throw SolverError("lorentzian evolution needs a 1D leaf mesh");

  double lo = *std::min_element(u0.values.begin(), u0.values.end());
  double hi = *std::max_element(u0.values.begin(), u0.values.end());
  double pad = 0.25 * std::max(1e-12, hi - lo);
  double margin = check_timelike(flux, st, lo - pad, hi + pad);

  std::vector<double> times = config.snapshot_times;
  if (times.empty()) {
    int m = std::max(config.snapshots, 2);
    times.resize(m);
    for (int i = 0; i < m; ++i) times[i] = config.t_end * i / (m - 1);
  }

  double dt0 = config.dt_override > 0.0
                   ? config.dt_override
                   : lorentzian_stable_dt(mesh, st, flux, config.epsilon, lo - pad,
                                          hi + pad, config.cfl, config.dt_max,
                                          config.mode);

  SolutionTrajectory traj;
  traj.mesh = &mesh;
  traj.times = times;
  traj.states.push_back(u0.values);
  traj.meta["scheme"] = "lorentzian_" + config.mode;
  traj.meta["epsilon"] = format17(config.epsilon);
  traj.meta["dt"] = format17(dt0);
  traj.meta["spacetime"] = st.name;
  traj.meta["timelike_flux"] = flux.name;
  traj.meta["timelike_margin"] = format17(margin);

  ScalarField u = u0;
  for (size_t s = 1; s < times.size(); ++s) {
    double span = times[s] - times[s - 1];
    int nsub = std::max(1, static_cast<int>(std::ceil(span / dt0 - 1e-12)));
    double dt = span / nsub;
    for (int k = 0; k < nsub; ++k)
      u = lorentzian_step(mesh, st, flux, u, dt, config.epsilon, config.mode);
    for (double v : u.values)
      if (!std::isfinite(v))
        throw SolverError("lorentzian run blew up before t = " + format17(times[s]));
    traj.states.push_back(u.values);
  }
  return traj;
}

PropertyReport foliation_contraction_check(const SolutionTrajectory& a,
                                           const SolutionTrajectory& b,
                                           const FoliatedSpacetime& st,
                                           const TimelikeFlux& flux) {
  PropertyReport rep;
  rep.property = "foliation_contraction";
  rep.tolerance = 1e-8;
  if (a.mesh == nullptr || b.mesh == nullptr ||
      a.mesh->cell_count() != b.mesh->cell_count() ||
      a.states.size() != b.states.size())
    throw SolverError("foliation_contraction: mismatched runs");
  for (size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw SolverError("foliation_contraction: mismatched snapshot times");

  const ManifoldMesh& mesh = *a.mesh;
  const int n = mesh.cell_count();
  std::vector<double> w(n);
  for (int c = 0; c < n; ++c) {
    const Vec& x = mesh.cells[c].center;
    w[c] = mesh.cells[c].volume * std::sqrt(std::max(0.0, -st.g00(x)));
  }
  std::vector<double> dist(a.states.size());
  std::vector<double> terms(n);
  for (size_t s = 0; s < a.states.size(); ++s) {
    for (int c = 0; c < n; ++c) {
      const Vec& x = mesh.cells[c].center;
      terms[c] = w[c] * std::abs(flux.f0(x, a.states[s][c]) - flux.f0(x, b.states[s][c]));
    }
    dist[s] = pairwise_sum(terms);
  }
  double denom = std::max(dist[0], 1e-15);
  double worst = std::numeric_limits<double>::infinity();
  size_t wi = 0, wj = 0;
  for (size_t i = 0; i < dist.size(); ++i) {
    for (size_t j = i + 1; j < dist.size(); ++j) {
      double m = (dist[i] - dist[j]) / denom;
      if (m < worst) { worst = m; wi = i; wj = j; }
    }
  }
  rep.margin = std::min(worst, 1.0);
  rep.pass = worst >= -rep.tolerance;
  rep.location = "t = " + format17(a.times[wi]) + " -> " + format17(a.times[wj]);
  rep.note = "D0 = " + format17(dist.front()) + ", DT = " + format17(dist.back());
  return rep;
}

PropertyReport check_lorentzian_entropy(const SolutionTrajectory& traj,
                                        const FoliatedSpacetime& st,
                                        const TimelikeFlux& flux,
                                        unsigned long long seed, double c_cap) {
  PropertyReport rep;
  rep.property = "lorentzian_entropy_weak";
  rep.tolerance = 0.0;
  if (!flux.compatible) {
    rep.applicable = false;
    rep.note = "needs a geometry compatible time-like flux";
    return rep;
  }
  const ManifoldMesh& mesh = *traj.mesh;
  const int n = mesh.cell_count();
  const size_t ns = traj.states.size();
  const double t_end = traj.times.back();
  if (ns < 2 || t_end <= 0.0) {
    rep.applicable = false;
    rep.note = "needs at least two snapshots";
    return rep;
  }

  std::vector<double> w(n);
  for (int c = 0; c < n; ++c)
    w[c] = spacetime_density(st, mesh.cells[c].center) * mesh.dx[0];

  double umin = traj.states[0][0], umax = umin;
  for (double v : traj.states[0]) { umin = std::min(umin, v); umax = std::max(umax, v); }

  struct LeafPair {
    std::string name;
    std::function<double(const Vec&, double)> F0, F1;
  };
  std::vector<LeafPair> pairs;
  const double qs[7] = {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95};
  for (int qi = 0; qi < 7; ++qi) {
    double kap = umin + qs[qi] * (umax - umin);
    auto f0 = flux.f0, f1 = flux.f1;
    pairs.push_back({"kruzkov_" + std::to_string(qi),
                     [f0, kap](const Vec& x, double u) {
                       double s = u > kap ? 1.0 : (u < kap ? -1.0 : 0.0);
                       return s * (f0(x, u) - f0(x, kap));
                     },
                     [f1, kap](const Vec& x, double u) {
                       double s = u > kap ? 1.0 : (u < kap ? -1.0 : 0.0);
                       return s * (f1(x, u) - f1(x, kap));
                     }});
  }
  {
    const Quadrature& gq = gauss_legendre(8);
    auto df0 = flux.du_f0, df1 = flux.du_f1;
    auto sq = [gq](const std::function<double(const Vec&, double)>& df, const Vec& x,
                   double u) {
      double acc = 0.0;
      for (size_t q = 0; q < gq.nodes.size(); ++q) {
        double wq = 0.5 * u * (gq.nodes[q] + 1.0);
        acc += gq.weights[q] * 0.5 * u * 2.0 * wq * df(x, wq);
      }
      return acc;
    };
    pairs.push_back({"square",
                     [sq, df0](const Vec& x, double u) { return sq(df0, x, u); },
                     [sq, df1](const Vec& x, double u) { return sq(df1, x, u); }});
  }

  auto basket = make_theta_basket(mesh, t_end, seed);
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_at = "";
  std::vector<double> f0tab(ns * n), f1tab(ns * n), terms(n);
  for (const auto& ep : pairs) {
    for (size_t s = 0; s < ns; ++s)
      for (int c = 0; c < n; ++c) {
        const Vec& x = mesh.cells[c].center;
        f0tab[s * n + c] = ep.F0(x, traj.states[s][c]);
        f1tab[s * n + c] = ep.F1(x, traj.states[s][c]);
      }
    for (const auto& th : basket) {
      std::vector<double> inner(ns);
      for (size_t s = 0; s < ns; ++s) {
        double t = traj.times[s];
        for (int c = 0; c < n; ++c) {
          const Vec& x = mesh.cells[c].center;
          terms[c] = w[c] * (f0tab[s * n + c] * th.dt(t, x) +
                             f1tab[s * n + c] * th.grad(t, x)[0]);
        }
        inner[s] = pairwise_sum(terms);
      }
      double r = 0.0;
      for (size_t s = 0; s + 1 < ns; ++s)
        r += 0.5 * (traj.times[s + 1] - traj.times[s]) * (inner[s] + inner[s + 1]);
      for (int c = 0; c < n; ++c)
        terms[c] = w[c] * f0tab[c] * th.value(traj.times[0], mesh.cells[c].center);
      r += pairwise_sum(terms);
      for (int c = 0; c < n; ++c)
        terms[c] = w[c] * f0tab[(ns - 1) * n + c] *
                   th.value(t_end, mesh.cells[c].center);
      r -= pairwise_sum(terms);
      if (r < worst) { worst = r; worst_at = ep.name + " / " + th.name; }
    }
  }

  double dt_meta = 0.0;
  auto it = traj.meta.find("dt");
  if (it != traj.meta.end()) dt_meta = std::strtod(it->second.c_str(), nullptr);
  double rate = std::max(0.0, -worst) / (mesh.min_spacing() + dt_meta);
  rep.margin = c_cap - rate;
  rep.pass = rate <= c_cap;
  rep.location = worst_at;
  rep.note = "C = " + format17(rate) + ", worst residual = " + format17(worst);
  return rep;
}

double horizon_speed_slope(const FoliatedSpacetime& st, const TimelikeFlux& flux,
                           double u, const std::vector<double>& r_samples) {
  if (r_samples.size() < 2)
    throw SolverError("horizon_speed_slope: need at least two radius samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double r : r_samples) {
    Vec x{r, 0.0};
    double speed = std::abs(flux.du_f1(x, u) / flux.du_f0(x, u));
    double lapse = -st.g00(x);
    if (speed <= 0.0 || lapse <= 0.0)
      throw SolverError("horizon_speed_slope: degenerate sample at r = " + format17(r));
    double lx = std::log(lapse), ly = std::log(speed);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-30)
    throw SolverError("horizon_speed_slope: radius samples do not separate");
  return (n * sxy - sx * sy) / det;
}

}  // namespace mcl
