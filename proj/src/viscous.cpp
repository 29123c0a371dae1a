#include "mcl/viscous.hpp"

#include <algorithm>
#include <cmath>

#include "mcl/numerics.hpp"

namespace mcl {

namespace {

double max_eig_2x2(const Mat& m) {
  double tr = m[0][0] + m[1][1];
  double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 + disc;
}

double metric_norm(const Mat& g, const Vec& v, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += g[i][j] * v[i] * v[j];
  return std::sqrt(std::max(0.0, s));
}

double speed_bound(const ManifoldMesh& mesh, const FluxFamily& flux, double lo, double hi) {
  double lam = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    for (int s = 0; s < 9; ++s) {
      double u = lo + (hi - lo) * s / 8.0;
      Vec df = flux.du_evaluate(mesh.cells[c].center, u);
      lam = std::max(lam, metric_norm(mesh.geom[c].g, df, mesh.dim()));
    }
  }
  return lam;
}

}  // namespace

double viscous_stable_dt(const ManifoldMesh& mesh, const FluxFamily& flux, double eps,
                         double lo, double hi, double cfl, double dt_max) {
  double lam = speed_bound(mesh, flux, lo, hi);
  double Lam = 0.0;
  for (const auto& gc : mesh.geom)
    Lam = std::max(Lam, mesh.dim() == 1 ? gc.ginv[0][0] : max_eig_2x2(gc.ginv));
  double dxmin = mesh.min_spacing();
  double dt = dt_max;
  if (lam > 0.0) dt = std::min(dt, dxmin / lam);
  if (eps > 0.0) dt = std::min(dt, dxmin * dxmin / (2.0 * mesh.dim() * eps * Lam));
  return cfl * dt;
}

double peclet_epsilon_floor(const ManifoldMesh& mesh, const FluxFamily& flux, double lo,
                            double hi) {
  double dxmax = std::max(mesh.dx[0], mesh.dim() == 2 ? mesh.dx[1] : 0.0);
  return speed_bound(mesh, flux, lo, hi) * dxmax / 2.0;
}

ScalarField mollify(const ManifoldMesh& mesh, const ScalarField& u) {
  // stddev 2 cells, cut at 3 sigma: w_k = exp(-k^2/8), k = -6..6.
  double w[13];
  for (int k = -6; k <= 6; ++k) w[k + 6] = std::exp(-k * k / 8.0);
  ScalarField out = u;
  for (int axis = 0; axis < mesh.dim(); ++axis) {
    ScalarField src = out;
    for (int j = 0; j < mesh.n[1]; ++j) {
      for (int i = 0; i < mesh.n[0]; ++i) {
        int c = mesh.cell_id(i, j);
        double acc = 0.0, wsum = 0.0;
        for (int k = -6; k <= 6; ++k) {
          int p = (axis == 0 ? i : j) + k;
          int nax = mesh.n[axis];
          if (mesh.chart.periodic[axis]) {
            p = ((p % nax) + nax) % nax;
          } else if (p < 0 || p >= nax) {
            continue;
          }
          int cc = axis == 0 ? mesh.cell_id(p, j) : mesh.cell_id(i, p);
          acc += w[k + 6] * src.values[cc];
          wsum += w[k + 6];
        }
        out.values[c] = acc / wsum;
      }
    }
  }
  return out;
}

namespace {

// Central first/second differences with zero-gradient fallback at band edges.
struct Stencil {
  double up[2]{}, um[2]{};  // neighbor values along each axis
  double D1[2]{}, D2[2]{};
};

Stencil stencil_at(const ManifoldMesh& mesh, const std::vector<double>& v, int c) {
  Stencil s{};
  for (int a = 0; a < mesh.dim(); ++a) {
    int ip = mesh.neighbor(c, a, +1);
    int im = mesh.neighbor(c, a, -1);
    s.up[a] = ip >= 0 ? v[ip] : v[c];
    s.um[a] = im >= 0 ? v[im] : v[c];
    s.D1[a] = (s.up[a] - s.um[a]) / (2.0 * mesh.dx[a]);
    s.D2[a] = (s.up[a] - 2.0 * v[c] + s.um[a]) / (mesh.dx[a] * mesh.dx[a]);
  }
  return s;
}

double mixed_second(const ManifoldMesh& mesh, const std::vector<double>& v, int c) {
  auto pick = [&](int d0, int d1) {
    int p = mesh.neighbor(c, 0, d0);
    if (p < 0) p = c;
    int q = mesh.neighbor(p, 1, d1);
    return q >= 0 ? v[q] : v[p];
  };
  return (pick(+1, +1) - pick(+1, -1) - pick(-1, +1) + pick(-1, -1)) /
         (4.0 * mesh.dx[0] * mesh.dx[1]);
}

}  // namespace

ScalarField viscous_step_advective(const ManifoldMesh& mesh, const FluxFamily& flux,
                                   const ScalarField& u, double eps, double dt) {
  ScalarField out = u;
  const int dim = mesh.dim();
  parallel_for(mesh.cell_count(), [&](int lo, int hi) {
    for (int c = lo; c < hi; ++c) {
      Stencil st = stencil_at(mesh, u.values, c);
      const CellGeometry& gc = mesh.geom[c];
      Vec df = flux.du_evaluate(mesh.cells[c].center, u.values[c]);
      double advect = 0.0;
      for (int a = 0; a < dim; ++a) advect += df[a] * st.D1[a];
      double lap = 0.0;
      if (eps > 0.0) {
        for (int i = 0; i < dim; ++i) lap += gc.ginv[i][i] * st.D2[i];
        if (dim == 2 && gc.ginv[0][1] != 0.0)
          lap += 2.0 * gc.ginv[0][1] * mixed_second(mesh, u.values, c);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
              lap -= gc.ginv[i][j] * gc.gamma.at(k, i, j) * st.D1[k];
      }
      out.values[c] = u.values[c] + dt * (-advect + eps * lap);
    }
  });
  return out;
}

ScalarField viscous_step_conservative(const ManifoldMesh& mesh, const FluxFamily& flux,
                                      const ScalarField& u, double eps, double dt) {
  ScalarField out = u;
  const int dim = mesh.dim();
  auto dens_flux = [&](int c, int axis) {
    return mesh.geom[c].sqrtg * flux.evaluate(mesh.cells[c].center, u.values[c])[axis];
  };
  auto diff_coef = [&](int c, int axis) {
    return mesh.geom[c].sqrtg * mesh.geom[c].ginv[axis][axis];
  };
  parallel_for(mesh.cell_count(), [&](int lo, int hi) {
    for (int c = lo; c < hi; ++c) {
      double adv = 0.0, diff = 0.0;
      for (int a = 0; a < dim; ++a) {
        int ip = mesh.neighbor(c, a, +1);
        int im = mesh.neighbor(c, a, -1);
        double Fp = ip >= 0 ? dens_flux(ip, a) : dens_flux(c, a);
        double Fm = im >= 0 ? dens_flux(im, a) : dens_flux(c, a);
        adv += (Fp - Fm) / (2.0 * mesh.dx[a]);
        if (eps > 0.0) {
          double uc = u.values[c];
          double up = ip >= 0 ? u.values[ip] : uc;
          double um = im >= 0 ? u.values[im] : uc;
          double Dc = diff_coef(c, a);
          double Dp = 0.5 * (Dc + (ip >= 0 ? diff_coef(ip, a) : Dc));
          double Dm = 0.5 * (Dc + (im >= 0 ? diff_coef(im, a) : Dc));
          diff += (Dp * (up - uc) - Dm * (uc - um)) / (mesh.dx[a] * mesh.dx[a]);
        }
      }
      if (eps > 0.0 && dim == 2) {
        // cross term d_i(sqrt g g^{ij} d_j u), i != j, central on cell values
        for (int i = 0; i < 2; ++i) {
          int j = 1 - i;
          auto cross_at = [&](int cc) {
            if (mesh.geom[cc].ginv[i][j] == 0.0) return 0.0;
            Stencil st = stencil_at(mesh, u.values, cc);
            return mesh.geom[cc].sqrtg * mesh.geom[cc].ginv[i][j] * st.D1[j];
          };
          int ip = mesh.neighbor(c, i, +1);
          int im = mesh.neighbor(c, i, -1);
          double Cp = cross_at(ip >= 0 ? ip : c);
          double Cm = cross_at(im >= 0 ? im : c);
          diff += (Cp - Cm) / (2.0 * mesh.dx[i]);
        }
      }
      out.values[c] = u.values[c] + dt / mesh.geom[c].sqrtg * (-adv + eps * diff);
    }
  });
  return out;
}

std::vector<double> epsilon_schedule(double dx) {
  return {4.0 * dx, 2.0 * dx, 1.0 * dx, 0.5 * dx};
}

SolutionTrajectory solve_viscous(const ManifoldMesh& mesh, const FluxFamily& flux,
                                 const ScalarField& u0, const ViscousConfig& config) {
  std::string form = config.form;
  if (form == "auto") form = flux.compatible ? "advective" : "conservative";
  if (form != "advective" && form != "conservative")
    throw SolverError("unknown viscous form: " + config.form);
  if (form == "advective" && !flux.compatible)
    throw SolverError("advective form requires a geometry compatible flux");

  ScalarField u = config.mollify_initial ? mollify(mesh, u0) : u0;

  std::vector<double> times = config.snapshot_times;
  if (times.empty()) {
    int m = std::max(config.snapshots, 2);
    times.resize(m);
    for (int i = 0; i < m; ++i) times[i] = config.t_end * i / (m - 1);
  }

  double lo = *std::min_element(u.values.begin(), u.values.end());
  double hi = *std::max_element(u.values.begin(), u.values.end());
  double pad = (config.range_inflation - 1.0) * std::max(1.0, hi - lo);
  double dt0 = config.dt_override > 0.0
                   ? config.dt_override
                   : viscous_stable_dt(mesh, flux, config.epsilon, lo - pad, hi + pad,
                                       config.cfl, config.dt_max);

  SolutionTrajectory traj;
  traj.mesh = &mesh;
  traj.times = times;
  traj.states.push_back(u.values);
  traj.meta["scheme"] = "viscous_" + form;
  traj.meta["epsilon"] = format17(config.epsilon);
  traj.meta["dt"] = format17(dt0);

  const bool advective = form == "advective";
  for (size_t s = 1; s < times.size(); ++s) {
    double span = times[s] - times[s - 1];
    int nsub = std::max(1, static_cast<int>(std::ceil(span / dt0 - 1e-12)));
    double dt = span / nsub;
    for (int k = 0; k < nsub; ++k)
      u = advective ? viscous_step_advective(mesh, flux, u, config.epsilon, dt)
                    : viscous_step_conservative(mesh, flux, u, config.epsilon, dt);
    for (double v : u.values)
      if (!std::isfinite(v)) throw SolverError("viscous run blew up before t = " +
                                               format17(times[s]));
    traj.states.push_back(u.values);
  }
  return traj;
}

double entropy_integral(const ManifoldMesh& mesh, const EntropyPair& pair,
                        const ScalarField& u) {
  std::vector<double> terms(mesh.cell_count());
  for (int c = 0; c < mesh.cell_count(); ++c)
    terms[c] = mesh.cells[c].volume * pair.U(u.values[c]);
  return pairwise_sum(terms);
}

double entropy_dissipation(const ManifoldMesh& mesh, const EntropyPair& pair,
                           const ScalarField& u, double eps) {
  std::vector<double> terms(mesh.cell_count());
  const double h = 1e-5;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    double d1[2] = {0.0, 0.0};
    for (int a = 0; a < mesh.dim(); ++a) {
      const int ip = mesh.neighbor(c, a, +1);
      const int im = mesh.neighbor(c, a, -1);
      const double up = ip >= 0 ? u.values[ip] : u.values[c];
      const double um = im >= 0 ? u.values[im] : u.values[c];
      d1[a] = (up - um) / (2.0 * mesh.dx[a]);
    }
    double grad2 = 0.0;
    for (int i = 0; i < mesh.dim(); ++i)
      for (int j = 0; j < mesh.dim(); ++j)
        grad2 += mesh.geom[c].ginv[i][j] * d1[i] * d1[j];
    double ddU = (pair.dU(u.values[c] + h) - pair.dU(u.values[c] - h)) / (2.0 * h);
    terms[c] = mesh.cells[c].volume * ddU * grad2;
  }
  return eps * pairwise_sum(terms);
}

}  // namespace mcl
