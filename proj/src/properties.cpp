#include "mcl/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>

#include "mcl/common.hpp"
#include "mcl/numerics.hpp"
#include "mcl/viscous.hpp"

namespace mcl {

namespace {

double uniform_draw(std::mt19937_64& rng) {
  // Explicit 53-bit conversion; std::uniform_real_distribution is not
  // bit-reproducible across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double meta_dt(const SolutionTrajectory& traj) {
  auto it = traj.meta.find("dt");
  if (it == traj.meta.end()) return 0.0;
  return std::strtod(it->second.c_str(), nullptr);
}

std::string scheme_of(const SolutionTrajectory& traj) {
  auto it = traj.meta.find("scheme");
  return it == traj.meta.end() ? std::string() : it->second;
}

double range_min(const std::vector<double>& v) {
  return *std::min_element(v.begin(), v.end());
}
double range_max(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end());
}

void require_matched(const SolutionTrajectory& a, const SolutionTrajectory& b,
                     const std::string& who) {
  if (a.mesh == nullptr || b.mesh == nullptr || a.states.empty() || b.states.empty()) {
    throw SolverError(who + ": empty trajectory");
  }
  if (a.mesh->cell_count() != b.mesh->cell_count()) {
    throw SolverError(who + ": mismatched runs (cell counts " +
                      std::to_string(a.mesh->cell_count()) + " vs " +
                      std::to_string(b.mesh->cell_count()) + ")");
  }
  if (a.times.size() != b.times.size()) {
    throw SolverError(who + ": mismatched runs (snapshot counts differ)");
  }
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12) {
      throw SolverError(who + ": mismatched runs (snapshot times differ at index " +
                        std::to_string(i) + ")");
    }
  }
  if (scheme_of(a) != scheme_of(b)) {
    throw SolverError(who + ": mismatched runs (schemes '" + scheme_of(a) + "' vs '" +
                      scheme_of(b) + "')");
  }
}

}  // namespace

bool is_viscous_run(const SolutionTrajectory& traj) {
  return scheme_of(traj).rfind("viscous", 0) == 0;
}

std::vector<ThetaMember> make_theta_basket(const ManifoldMesh& mesh, double t_end,
                                           unsigned long long seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const MetricChart& chart = mesh.chart;
  const int dim = chart.dim;

  struct Shape {
    std::string name;
    bool constant = false;
    Vec center{0.0, 0.0};
    Vec radius{1.0, 1.0};
  };
  std::vector<Shape> shapes;
  shapes.push_back({"const", true, {}, {}});
  for (char tag : {'A', 'B'}) {
    Shape s;
    s.name = std::string("bump") + tag;
    for (int a = 0; a < dim; ++a) {
      const double p = chart.period[a];
      s.radius[a] = 0.3 * p;
      if (chart.periodic[a]) {
        s.center[a] = chart.origin[a] + uniform_draw(rng) * p;
      } else {
        // Keep the support strictly inside the band.
        s.center[a] = chart.origin[a] + (0.3 + 0.4 * uniform_draw(rng)) * p;
      }
    }
    shapes.push_back(s);
  }

  std::vector<ThetaMember> basket;
  for (int wk : {1, 2, 4}) {
    const double w = t_end / wk;
    for (const Shape& s : shapes) {
      ThetaMember m;
      m.name = "w" + std::to_string(wk) + "_" + s.name;
      const bool constant = s.constant;
      const Vec center = s.center;
      const Vec radius = s.radius;
      const Vec period = chart.period;
      const std::array<bool, 2> per = chart.periodic;
      auto spatial = [=](const Vec& x) {
        if (constant) return 1.0;
        double v = 1.0;
        for (int a = 0; a < dim; ++a) {
          const double d = per[a] ? periodic_delta(x[a], center[a], period[a])
                                  : x[a] - center[a];
          v *= bump(d / radius[a]);
        }
        return v;
      };
      auto spatial_grad = [=](const Vec& x) {
        Vec g{0.0, 0.0};
        if (constant) return g;
        double parts[2] = {1.0, 1.0};
        double deriv[2] = {0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
          const double d = per[a] ? periodic_delta(x[a], center[a], period[a])
                                  : x[a] - center[a];
          parts[a] = bump(d / radius[a]);
          deriv[a] = bump_deriv(d / radius[a]) / radius[a];
        }
        for (int a = 0; a < dim; ++a) {
          g[a] = deriv[a];
          for (int b = 0; b < dim; ++b) {
            if (b != a) g[a] *= parts[b];
          }
        }
        return g;
      };
      m.value = [=](double t, const Vec& x) { return bump(t / w) * spatial(x); };
      m.dt = [=](double t, const Vec& x) {
        return bump_deriv(t / w) / w * spatial(x);
      };
      m.grad = [=](double t, const Vec& x) {
        Vec g = spatial_grad(x);
        const double psi = bump(t / w);
        g[0] *= psi;
        g[1] *= psi;
        return g;
      };
      basket.push_back(std::move(m));
    }
  }
  return basket;
}

double entropy_source(const MetricChart& chart, const FluxFamily& flux,
                      const EntropyPair& pair, const Vec& x, double u) {
  if (flux.compatible) return 0.0;
  if (flux.weighted) {
    const double kx = flux.kfun.value(x[0]);
    const double kp = flux.kfun.deriv(x[0]);
    const double fval = flux.evaluate(x, u)[0];
    const double big_f = pair.F(x, u)[0];
    return kp / kx * (big_f - pair.dU(u) * fval);
  }
  const auto terms = general_entropy_residual_terms(chart, flux, pair, x, u);
  TangentField frozen = [&flux, u](const Vec& p) { return flux.evaluate(p, u); };
  return terms.second - pair.dU(u) * divergence(chart, frozen, x);
}

namespace {

/// Trapezoid-in-time weak residual for tabulated densities:
/// R = sum_t trap( sum_c vol (W theta_t + G . grad theta - S theta) )
///     + sum_c vol W(0) theta(0) - sum_c vol W(T) theta(T).
double weak_residual_tabulated(const SolutionTrajectory& traj,
                               const std::vector<std::vector<double>>& wvals,
                               const std::vector<std::vector<Vec>>& gvals,
                               const std::vector<std::vector<double>>& svals,
                               const ThetaMember& theta) {
  const ManifoldMesh& mesh = *traj.mesh;
  const std::size_t nt = traj.times.size();
  const std::size_t nc = mesh.cells.size();
  std::vector<double> interior(nt, 0.0);
  std::vector<double> cell_terms(nc);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = traj.times[i];
    for (std::size_t c = 0; c < nc; ++c) {
      const Vec& x = mesh.cells[c].center;
      const double vol = mesh.cells[c].volume;
      const Vec th_x = theta.grad(t, x);
      double term = wvals[i][c] * theta.dt(t, x) + gvals[i][c][0] * th_x[0] +
                    gvals[i][c][1] * th_x[1];
      if (!svals.empty()) term -= svals[i][c] * theta.value(t, x);
      cell_terms[c] = vol * term;
    }
    interior[i] = pairwise_sum(cell_terms);
  }
  double r = 0.0;
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    r += 0.5 * (interior[i] + interior[i + 1]) * (traj.times[i + 1] - traj.times[i]);
  }
  for (std::size_t c = 0; c < nc; ++c) {
    const Vec& x = mesh.cells[c].center;
    cell_terms[c] = mesh.cells[c].volume * wvals.front()[c] * theta.value(traj.times.front(), x);
  }
  r += pairwise_sum(cell_terms);
  for (std::size_t c = 0; c < nc; ++c) {
    const Vec& x = mesh.cells[c].center;
    cell_terms[c] = mesh.cells[c].volume * wvals.back()[c] * theta.value(traj.times.back(), x);
  }
  r -= pairwise_sum(cell_terms);
  return r;
}

struct BasketScan {
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_member;
  double rate_c = 0.0;  // max(0, -worst) / (dx + dt)
};

BasketScan scan_entropy_basket(const SolutionTrajectory& traj, const FluxFamily& flux,
                               unsigned long long seed) {
  const ManifoldMesh& mesh = *traj.mesh;
  const std::size_t nt = traj.times.size();
  const std::size_t nc = mesh.cells.size();
  const auto basket = make_theta_basket(mesh, traj.times.back(), seed);

  const double lo = range_min(traj.states.front());
  const double hi = range_max(traj.states.front());
  std::vector<EntropyPair> pairs;
  for (double q : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95}) {
    pairs.push_back(kruzkov_pair(flux, lo + q * (hi - lo)));
  }
  pairs.push_back(square_entropy_pair(flux));

  BasketScan scan;
  std::vector<std::vector<double>> wvals(nt, std::vector<double>(nc));
  std::vector<std::vector<Vec>> gvals(nt, std::vector<Vec>(nc));
  std::vector<std::vector<double>> svals;
  const bool need_source = !flux.compatible;
  if (need_source) svals.assign(nt, std::vector<double>(nc));
  for (const EntropyPair& pair : pairs) {
    for (std::size_t i = 0; i < nt; ++i) {
      auto& wrow = wvals[i];
      auto& grow = gvals[i];
      const auto& state = traj.states[i];
      parallel_for(nc, [&](std::size_t lo_c, std::size_t hi_c) {
        for (std::size_t c = lo_c; c < hi_c; ++c) {
          const Vec& x = mesh.cells[c].center;
          wrow[c] = pair.U(state[c]);
          grow[c] = pair.F(x, state[c]);
          if (need_source) {
            svals[i][c] = entropy_source(mesh.chart, flux, pair, x, state[c]);
          }
        }
      });
    }
    for (const ThetaMember& theta : basket) {
      const double r = weak_residual_tabulated(traj, wvals, gvals, svals, theta);
      if (r < scan.worst) {
        scan.worst = r;
        scan.worst_member = pair.name + " x " + theta.name;
      }
    }
  }
  const double dt = meta_dt(traj);
  const double dx = mesh.min_spacing();
  scan.rate_c = std::max(0.0, -scan.worst) / (dx + dt);
  return scan;
}

}  // namespace

PropertyReport check_lp_stability(const SolutionTrajectory& traj, const FluxFamily& flux) {
  PropertyReport rep;
  rep.property = "lp_stability";
  if (!flux.compatible) {
    rep.applicable = false;
    rep.note = "not applicable: non-compatible flux has no uniform L^p estimate";
    return rep;
  }
  rep.tolerance = is_viscous_run(traj) ? 1e-8 : 1e-10;
  const double inf = std::numeric_limits<double>::infinity();
  double worst = inf;
  for (double p : {1.0, 2.0, inf}) {
    std::vector<double> norms(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      norms[i] = lp_norm(traj.at(i), p);
    }
    const double scale = std::max(norms[0], 1e-300);
    for (std::size_t i = 0; i < norms.size(); ++i) {
      for (std::size_t j = i + 1; j < norms.size(); ++j) {
        const double margin = (norms[i] - norms[j]) / scale;
        if (margin < worst) {
          worst = margin;
          rep.location = "L^" + (p == inf ? std::string("inf") : format17(p)) +
                         " between t=" + format17(traj.times[i]) +
                         " and t=" + format17(traj.times[j]);
        }
      }
    }
  }
  rep.margin = worst;
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

PropertyReport check_contraction(const SolutionTrajectory& a, const SolutionTrajectory& b) {
  require_matched(a, b, "check_contraction");
  PropertyReport rep;
  rep.property = "l1_contraction";
  rep.tolerance = is_viscous_run(a) ? 1e-8 : 1e-12;
  std::vector<double> d(a.times.size());
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    d[i] = l1_distance(a.at(i), b.at(i));
  }
  const double floor_scale =
      1e-15 * (1.0 + lp_norm(a.at(0), 1.0) + lp_norm(b.at(0), 1.0));
  const double denom = std::max(d[0], floor_scale);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      const double margin = (d[i] - d[j]) / denom;
      if (margin < worst) {
        worst = margin;
        rep.location = "t=" + format17(a.times[i]) + " -> t=" + format17(a.times[j]);
      }
    }
  }
  rep.margin = worst;
  rep.note = "d0 = " + format17(d.front()) + ", dT = " + format17(d.back());
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

PropertyReport check_kruzkov_inequality(const SolutionTrajectory& a,
                                        const SolutionTrajectory& b,
                                        const FluxFamily& flux,
                                        unsigned long long seed) {
  require_matched(a, b, "check_kruzkov_inequality");
  PropertyReport rep;
  rep.property = "kruzkov_difference";
  const ManifoldMesh& mesh = *a.mesh;
  const std::size_t nt = a.times.size();
  const std::size_t nc = mesh.cells.size();
  std::vector<std::vector<double>> wvals(nt, std::vector<double>(nc));
  std::vector<std::vector<Vec>> gvals(nt, std::vector<Vec>(nc));
  for (std::size_t i = 0; i < nt; ++i) {
    parallel_for(nc, [&](std::size_t lo_c, std::size_t hi_c) {
      for (std::size_t c = lo_c; c < hi_c; ++c) {
        const double u = a.states[i][c];
        const double v = b.states[i][c];
        const Vec& x = mesh.cells[c].center;
        const double sgn = v > u ? 1.0 : (v < u ? -1.0 : 0.0);
        wvals[i][c] = std::abs(v - u);
        const Vec fu = flux.evaluate(x, u);
        const Vec fv = flux.evaluate(x, v);
        gvals[i][c] = Vec{sgn * (fv[0] - fu[0]), sgn * (fv[1] - fu[1])};
      }
    });
  }
  const auto basket = make_theta_basket(mesh, a.times.back(), seed);
  double worst = std::numeric_limits<double>::infinity();
  for (const ThetaMember& theta : basket) {
    const double r = weak_residual_tabulated(a, wvals, gvals, {}, theta);
    if (r < worst) {
      worst = r;
      rep.location = theta.name;
    }
  }
  const double dx = mesh.min_spacing();
  const double dt = meta_dt(a);
  rep.margin = worst;
  rep.tolerance = 50.0 * (dx + dt);
  rep.note = "C = " + format17(std::max(0.0, -worst) / (dx + dt));
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

PropertyReport check_tv_envelope(const SolutionTrajectory& traj, const FluxFamily& flux,
                                 double* c1_fit) {
  PropertyReport rep;
  rep.property = "tv_envelope";
  std::vector<double> tv(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    tv[i] = total_variation(traj.at(i));
  }
  double c1 = 0.0;
  for (std::size_t i = 1; i < tv.size(); ++i) {
    const double t = traj.times[i] - traj.times[0];
    if (t <= 0.0) continue;
    const double ratio = std::max(tv[i], 1e-300) / (1.0 + tv[0]);
    c1 = std::max(c1, std::log(ratio) / t);
  }
  c1 = std::max(c1, 0.0);
  if (c1_fit != nullptr) *c1_fit = c1;
  const bool flat_1d = traj.mesh->dim() == 1 &&
                       traj.mesh->chart.name == "flat_circle" && flux.compatible;
  if (flat_1d) {
    rep.margin = 0.01 - c1;
    rep.tolerance = 0.0;
    rep.note = "C1 = " + format17(c1) + " (asserted <= 0.01, flat 1D compatible)";
    rep.pass = rep.margin >= -rep.tolerance;
  } else {
    rep.margin = 0.0;
    rep.note = "C1 = " + format17(c1) + " (reported, no assertion)";
    rep.pass = true;
  }
  return rep;
}

PropertyReport check_time_lipschitz(const SolutionTrajectory& traj,
                                    const FluxFamily& flux) {
  PropertyReport rep;
  rep.property = "time_lipschitz";
  if (!flux.compatible) {
    rep.applicable = false;
    rep.note = "not applicable: TV rate bound proven for compatible fluxes";
    return rep;
  }
  const double tv0 = total_variation(traj.at(0));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    for (std::size_t j = i + 1; j < traj.times.size(); ++j) {
      const double bound = 1.1 * tv0 * (traj.times[j] - traj.times[i]);
      const double actual = l1_distance(traj.at(i), traj.at(j));
      const double margin = (bound - actual) / std::max(bound, 1e-300);
      if (margin < worst) {
        worst = margin;
        rep.location = "t=" + format17(traj.times[i]) + " -> t=" + format17(traj.times[j]);
      }
    }
  }
  rep.margin = std::min(worst, 1.0);
  rep.tolerance = 0.0;
  rep.note = "TV(u0) = " + format17(tv0);
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

PropertyReport check_max_principle(const SolutionTrajectory& traj,
                                   const FluxFamily& flux) {
  PropertyReport rep;
  rep.property = "max_principle";
  if (!flux.compatible) {
    rep.applicable = false;
    rep.note = "not applicable: non-compatible flux may leave the data range";
    return rep;
  }
  const double lo = range_min(traj.states.front());
  const double hi = range_max(traj.states.front());
  const double scale = std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  rep.tolerance = is_viscous_run(traj) ? 1e-12 : 1e-13;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    for (std::size_t c = 0; c < traj.states[i].size(); ++c) {
      const double u = traj.states[i][c];
      const double margin = std::min(u - lo, hi - u) / scale;
      if (margin < worst) {
        worst = margin;
        rep.location = "t=" + format17(traj.times[i]) + ", cell " + std::to_string(c);
      }
    }
  }
  rep.margin = worst;
  rep.note = "data range [" + format17(lo) + ", " + format17(hi) + "]";
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

PropertyReport check_mass_conservation(const SolutionTrajectory& traj) {
  PropertyReport rep;
  rep.property = "mass_conservation";
  const std::string scheme = scheme_of(traj);
  const bool conservative =
      scheme.rfind("fv", 0) == 0 || scheme == "viscous_conservative";
  if (!conservative) {
    rep.applicable = false;
    rep.note = "not applicable: scheme '" + scheme + "' is not in conservation form";
    return rep;
  }
  const double m0 = integrate_field(traj.at(0));
  const double scale = std::max(1.0, std::abs(m0));
  double worst = 0.0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const double dev = std::abs(integrate_field(traj.at(i)) - m0);
    if (dev > worst) {
      worst = dev;
      rep.location = "t=" + format17(traj.times[i]);
    }
  }
  rep.margin = -worst / scale;
  rep.tolerance = 1e-12;
  rep.note = "mass(0) = " + format17(m0);
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

DichotomyResult check_smooth_entropy_dichotomy(
    const ManifoldMesh& mesh_compatible, const FluxFamily& flux_compatible,
    const std::vector<double>& u0_compatible, const ManifoldMesh& mesh_general,
    const FluxFamily& flux_general, const std::vector<double>& u0_general,
    const EntropyPair& pair, double window, double dt, double bound_compatible) {
  if (!flux_compatible.compatible) {
    throw SolverError("check_smooth_entropy_dichotomy: first flux must be compatible");
  }
  auto drift_of = [&](const ManifoldMesh& mesh, const FluxFamily& flux,
                      const std::vector<double>& u0, bool advective) {
    ScalarField u{&mesh, u0};
    const double e0 = entropy_integral(mesh, pair, u);
    const int steps = static_cast<int>(std::ceil(window / dt - 1e-12));
    const double h = window / steps;
    for (int s = 0; s < steps; ++s) {
      u = advective ? viscous_step_advective(mesh, flux, u, 0.0, h)
                    : viscous_step_conservative(mesh, flux, u, 0.0, h);
    }
    return std::abs(entropy_integral(mesh, pair, u) - e0) / window;
  };
  DichotomyResult out;
  out.drift_compatible = drift_of(mesh_compatible, flux_compatible, u0_compatible, true);
  out.drift_general = drift_of(mesh_general, flux_general, u0_general, false);
  out.ratio = out.drift_general / std::max(out.drift_compatible, 1e-300);
  out.report.property = "smooth_entropy_dichotomy";
  out.report.margin = std::min(bound_compatible - out.drift_compatible,
                               (out.ratio - 10.0) * bound_compatible);
  out.report.tolerance = 0.0;
  out.report.note = "drift(compatible) = " + format17(out.drift_compatible) +
                    ", drift(general) = " + format17(out.drift_general) +
                    ", ratio = " + format17(out.ratio);
  out.report.pass = out.drift_compatible <= bound_compatible && out.ratio >= 10.0;
  return out;
}

PropertyReport check_weak_entropy_solution(const SolutionTrajectory& traj,
                                           const FluxFamily& flux,
                                           unsigned long long seed, double c_cap) {
  PropertyReport rep;
  rep.property = "weak_entropy_solution";
  const BasketScan scan = scan_entropy_basket(traj, flux, seed);
  const double dx = traj.mesh->min_spacing();
  const double dt = meta_dt(traj);
  rep.margin = scan.worst;
  rep.tolerance = c_cap * (dx + dt);
  rep.location = scan.worst_member;
  rep.note = "C = " + format17(scan.rate_c);
  rep.pass = rep.margin >= -rep.tolerance;
  return rep;
}

double entropy_rate_constant(const SolutionTrajectory& traj, const FluxFamily& flux,
                             unsigned long long seed) {
  return scan_entropy_basket(traj, flux, seed).rate_c;
}

void write_property_reports(const std::filesystem::path& dir,
                            const std::vector<PropertyReport>& reports) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "reports.csv");
    csv << "property,applicable,pass,margin,tolerance,location,note\n";
    for (const auto& r : reports) {
      auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char ch : s) {
          if (ch == '"') q += "\"\"";
          else q += ch;
        }
        return q + "\"";
      };
      csv << r.property << ',' << (r.applicable ? 1 : 0) << ',' << (r.pass ? 1 : 0)
          << ',' << format17(r.margin) << ',' << format17(r.tolerance) << ','
          << quote(r.location) << ',' << quote(r.note) << '\n';
    }
  }
  std::ofstream txt(dir / "reports.txt");
  for (const auto& r : reports) {
    txt << (r.applicable ? (r.pass ? "[PASS] " : "[FAIL] ") : "[SKIP] ") << r.property
        << "  margin=" << format17(r.margin) << "  tol=" << format17(r.tolerance);
    if (!r.location.empty()) txt << "  at " << r.location;
    if (!r.note.empty()) txt << "  (" << r.note << ")";
    txt << '\n';
  }
}

}  // namespace mcl
