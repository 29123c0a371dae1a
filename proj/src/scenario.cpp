#include "mcl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "mcl/lax_oracle.hpp"
#include "mcl/numerics.hpp"

namespace mcl {

namespace {

const std::vector<std::string> kSections = {"manifold", "flux",       "initial",
                                            "solver",   "properties", "output"};
const std::vector<std::string> kFamilies = {"compatible_transport", "weighted_1d",
                                            "lorentzian_transport", "lorentzian_nonlinear"};
const std::vector<std::string> kProfiles = {"linear", "burgers", "cubic"};
const std::vector<std::string> kFields = {"constant", "sine_mix", "zonal", "conformal"};
const std::vector<std::string> kInitials = {"constant", "sine", "pulse", "riemann"};
const std::vector<std::string> kSolvers = {"fv", "viscous", "lorentzian", "oracle"};
const std::vector<std::string> kProperties = {
    "lp_stability",        "max_principle",      "mass_conservation",
    "tv_envelope",         "time_lipschitz",     "weak_entropy_solution",
    "l1_contraction",      "kruzkov_difference", "characteristic_drift",
    "foliation_contraction", "lorentzian_entropy_weak", "timelike_margin"};

std::vector<std::string> chart_param_keys(const std::string& chart) {
  if (chart == "flat_circle") return {"L"};
  if (chart == "weighted_circle") return {"k0", "k1", "freq"};
  if (chart == "flat_torus") return {"L1", "L2"};
  if (chart == "wavy_torus") return {"amp"};
  if (chart == "sphere_band") return {"theta_max"};
  if (chart == "schwarzschild_r") return {"m", "r0", "r1"};
  return {};
}

std::string nearest(const std::string& word, const std::vector<std::string>& cands) {
  int best = std::numeric_limits<int>::max();
  std::string who;
  for (const auto& c : cands) {
    int d = levenshtein(word, c);
    if (d < best) {
      best = d;
      who = c;
    }
  }
  return who;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void trim(std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t\r");
  s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

bool to_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool to_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return false;
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) return false;
  out = static_cast<int>(v);
  return true;
}

bool to_seed(const std::string& s, unsigned long long& out) {
  if (s.empty() || s[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

bool safe_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return s != "." && s != "..";
}

struct ParseState {
  Scenario sc;
  std::vector<ParseIssue> issues;
  std::map<std::string, int> where;  // "section.key" -> line of last assignment

  void issue(int line, const std::string& msg) { issues.push_back({line, msg}); }
  int line_of(const std::string& key) const {
    auto it = where.find(key);
    return it == where.end() ? 0 : it->second;
  }
};

void assign(ParseState& st, const std::string& section, const std::string& key,
            const std::string& value, int ln) {
  Scenario& sc = st.sc;
  st.where[section + "." + key] = ln;
  auto want_double = [&](double& slot) {
    if (!to_double(value, slot)) st.issue(ln, "bad numeric value '" + value + "' for " + key);
  };
  auto want_int = [&](int& slot) {
    if (!to_int(value, slot)) st.issue(ln, "bad integer value '" + value + "' for " + key);
  };
  auto want_enum = [&](std::string& slot, const std::vector<std::string>& valid,
                       const std::string& what) {
    if (!contains(valid, value)) {
      st.issue(ln, "unknown " + what + " '" + value + "' (did you mean '" +
                       nearest(value, valid) + "'?)");
    }
    slot = value;
  };

  if (section.empty()) {
    if (key == "name") {
      if (!safe_name(value)) st.issue(ln, "scenario name must be a plain identifier");
      sc.name = value;
    } else if (key == "seed") {
      if (!to_seed(value, sc.seed)) st.issue(ln, "seed must be a nonnegative integer");
    } else {
      st.issue(ln, "unknown top-level key '" + key + "' (did you mean '" +
                       nearest(key, {"name", "seed"}) + "'?)");
    }
    return;
  }
  if (section == "manifold") {
    if (key == "chart") {
      want_enum(sc.chart, chart_names(), "chart");
    } else if (key == "n0") {
      want_int(sc.n0);
    } else if (key == "n1") {
      want_int(sc.n1);
    } else {
      double v = 0.0;
      if (!to_double(value, v)) {
        st.issue(ln, "bad numeric value '" + value + "' for chart parameter " + key);
      } else {
        sc.chart_params[key] = v;
      }
    }
    return;
  }
  if (section == "flux") {
    if (key == "family") want_enum(sc.flux_family, kFamilies, "flux family");
    else if (key == "profile") want_enum(sc.flux_profile, kProfiles, "flux profile");
    else if (key == "field") want_enum(sc.flux_field, kFields, "tangent field");
    else if (key == "a") want_double(sc.flux_a);
    else if (key == "b") want_double(sc.flux_b);
    else if (key == "v1") want_double(sc.field_v1);
    else if (key == "v2") want_double(sc.field_v2);
    else st.issue(ln, "unknown [flux] key '" + key + "' (did you mean '" +
                          nearest(key, {"family", "profile", "field", "a", "b", "v1", "v2"}) +
                          "'?)");
    return;
  }
  if (section == "initial") {
    if (key == "profile") want_enum(sc.initial, kInitials, "initial profile");
    else if (key == "amplitude") want_double(sc.amplitude);
    else if (key == "mean") want_double(sc.mean);
    else if (key == "phase") want_double(sc.phase);
    else if (key == "center") want_double(sc.center);
    else if (key == "width") want_double(sc.width);
    else if (key == "left") want_double(sc.left);
    else if (key == "right") want_double(sc.right);
    else if (key == "split") want_double(sc.split);
    else if (key == "members") want_int(sc.members);
    else st.issue(ln, "unknown [initial] key '" + key + "' (did you mean '" +
                          nearest(key, {"profile", "amplitude", "mean", "phase", "center",
                                        "width", "left", "right", "split", "members"}) +
                          "'?)");
    return;
  }
  if (section == "solver") {
    if (key == "type") want_enum(sc.solver, kSolvers, "solver type");
    else if (key == "scheme") sc.scheme = value;
    else if (key == "epsilon") want_double(sc.epsilon);
    else if (key == "cfl") want_double(sc.cfl);
    else if (key == "t_end") want_double(sc.t_end);
    else if (key == "snapshots") want_int(sc.snapshots);
    else if (key == "dt_override") want_double(sc.dt_override);
    else st.issue(ln, "unknown [solver] key '" + key + "' (did you mean '" +
                          nearest(key, {"type", "scheme", "epsilon", "cfl", "t_end",
                                        "snapshots", "dt_override"}) +
                          "'?)");
    return;
  }
  if (section == "properties") {
    if (key == "check") {
      if (!contains(kProperties, value)) {
        st.issue(ln, "unknown property '" + value + "' (did you mean '" +
                         nearest(value, kProperties) + "'?)");
      } else {
        sc.properties.push_back(value);
      }
    } else {
      st.issue(ln, "unknown [properties] key '" + key + "' (only 'check' is valid)");
    }
    return;
  }
  if (section == "output") {
    if (key == "dir") {
      if (!value.empty() && !safe_name(value))
        st.issue(ln, "output dir must be a single directory name");
      sc.out_dir = value;
    } else {
      st.issue(ln, "unknown [output] key '" + key + "' (only 'dir' is valid)");
    }
    return;
  }
}

std::vector<std::string> valid_schemes(const std::string& solver) {
  if (solver == "fv" || solver == "oracle") return {"rusanov", "engquist_osher"};
  if (solver == "viscous") return {"auto", "advective", "conservative"};
  return {"advective", "conservative"};
}

void validate(ParseState& st) {
  Scenario& sc = st.sc;
  auto at = [&](const std::string& key) { return st.line_of(key); };

  const bool chart_known = contains(chart_names(), sc.chart);
  int dim = 1;
  if (chart_known) {
    dim = (sc.chart == "flat_torus" || sc.chart == "wavy_torus" || sc.chart == "sphere_band")
              ? 2
              : 1;
    const auto keys = chart_param_keys(sc.chart);
    for (const auto& [k, v] : sc.chart_params) {
      (void)v;
      if (!contains(keys, k)) {
        st.issue(at("manifold." + k), "chart '" + sc.chart + "' has no parameter '" + k +
                                          "' (did you mean '" + nearest(k, keys) + "'?)");
      }
    }
  }
  if (sc.n0 < 16) st.issue(at("manifold.n0"), "resolution n0 must be at least 16");
  if (dim == 2 && sc.n1 != 0 && sc.n1 < 16)
    st.issue(at("manifold.n1"), "resolution n1 must be at least 16 (or 0 for the default)");
  if (dim == 1 && sc.n1 > 1)
    st.issue(at("manifold.n1"), "chart '" + sc.chart + "' has a single axis; drop n1");

  const bool lor_family = sc.flux_family.rfind("lorentzian", 0) == 0;
  if (lor_family != (sc.solver == "lorentzian")) {
    st.issue(at("flux.family"), lor_family
                                    ? "flux family '" + sc.flux_family +
                                          "' needs solver type lorentzian"
                                    : "solver type lorentzian needs a lorentzian_* flux family");
  }
  if (chart_known && sc.flux_family == "compatible_transport") {
    auto ok = [&]() {
      if (sc.flux_field == "constant")
        return sc.chart == "flat_circle" || sc.chart == "flat_torus";
      if (sc.flux_field == "sine_mix") return sc.chart == "flat_torus";
      if (sc.flux_field == "zonal") return sc.chart == "sphere_band";
      return sc.chart == "wavy_torus";  // conformal
    }();
    if (!ok) {
      st.issue(at("flux.field"), "field '" + sc.flux_field +
                                     "' is not divergence free on chart '" + sc.chart + "'");
    }
  }
  if (chart_known && sc.flux_family == "weighted_1d" && sc.chart != "flat_circle" &&
      sc.chart != "weighted_circle") {
    st.issue(at("flux.family"),
             "weighted_1d runs on flat_circle or weighted_circle, not '" + sc.chart + "'");
  }
  if (chart_known && sc.solver == "lorentzian" && sc.chart != "flat_circle" &&
      sc.chart != "schwarzschild_r") {
    st.issue(at("manifold.chart"),
             "lorentzian runs need a flat_circle or schwarzschild_r leaf, not '" + sc.chart +
                 "'");
  }
  if (sc.solver == "oracle") {
    if (sc.flux_family != "weighted_1d")
      st.issue(at("solver.type"), "oracle runs need the weighted_1d flux family");
    if (sc.initial == "riemann")
      st.issue(at("initial.profile"), "oracle runs need smooth initial data (no riemann)");
  }
  if (lor_family) {
    if (std::abs(sc.flux_a) >= 1.0)
      st.issue(at("flux.a"), "time-like fluxes need |a| < 1 (fraction of the null speed)");
    if (sc.flux_b < 0.0) st.issue(at("flux.b"), "cubic weight b must be nonnegative");
  } else if (sc.flux_a <= 0.0) {
    st.issue(at("flux.a"), "profile scale a must be positive");
  }

  if (sc.scheme.empty()) sc.scheme = default_scheme(sc.solver);
  const auto schemes = valid_schemes(sc.solver);
  if (!contains(schemes, sc.scheme)) {
    st.issue(at("solver.scheme"), "scheme '" + sc.scheme + "' is not valid for solver '" +
                                      sc.solver + "' (did you mean '" +
                                      nearest(sc.scheme, schemes) + "'?)");
  }
  if (sc.epsilon < 0.0) st.issue(at("solver.epsilon"), "epsilon must be nonnegative");
  if (sc.solver == "viscous" && sc.epsilon <= 0.0)
    st.issue(at("solver.epsilon"), "viscous runs need epsilon > 0");
  if (!(sc.cfl > 0.0 && sc.cfl <= 0.9))
    st.issue(at("solver.cfl"), "cfl must lie in (0, 0.9], got " + format17(sc.cfl));
  else if (sc.solver == "fv" && dim == 2 && sc.cfl > 0.5)
    st.issue(at("solver.cfl"), "2D monotone bound needs cfl <= 0.5, got " + format17(sc.cfl));
  if (sc.t_end <= 0.0) st.issue(at("solver.t_end"), "t_end must be positive");
  if (sc.snapshots < 2) st.issue(at("solver.snapshots"), "need at least 2 snapshots");
  if (sc.dt_override < 0.0) st.issue(at("solver.dt_override"), "dt_override must be >= 0");
  if (sc.members < 1 || sc.members > 16)
    st.issue(at("initial.members"), "members must lie in [1, 16]");
  if (sc.initial == "pulse" && !(sc.width > 0.0 && sc.width <= 0.5))
    st.issue(at("initial.width"), "pulse width must lie in (0, 0.5] (fraction of the period)");
  if (sc.initial == "riemann" && !(sc.split > 0.0 && sc.split < 1.0))
    st.issue(at("initial.split"), "riemann split must lie in (0, 1)");
}

}  // namespace

std::string default_scheme(const std::string& solver) {
  if (solver == "viscous") return "auto";
  if (solver == "lorentzian") return "advective";
  return "rusanov";
}

Scenario parse_scenario(const std::string& text) {
  ParseState st;
  std::istringstream in(text);
  std::string line, section;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        st.issue(ln, "unterminated section header '" + line + "'");
        continue;
      }
      section = line.substr(1, line.size() - 2);
      trim(section);
      if (!contains(kSections, section)) {
        st.issue(ln, "unknown section [" + section + "] (did you mean [" +
                         nearest(section, kSections) + "]?)");
        section = "";
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      st.issue(ln, "expected key = value, got '" + line + "'");
      continue;
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    trim(key);
    trim(value);
    if (key.empty()) {
      st.issue(ln, "missing key before '='");
      continue;
    }
    assign(st, section, key, value, ln);
  }
  validate(st);
  if (!st.issues.empty()) throw ConfigError(std::move(st.issues));
  return st.sc;
}

Scenario parse_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SolverError("cannot read scenario file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.seed == b.seed && a.chart == b.chart &&
         a.chart_params == b.chart_params && a.n0 == b.n0 && a.n1 == b.n1 &&
         a.flux_family == b.flux_family && a.flux_profile == b.flux_profile &&
         a.flux_field == b.flux_field && a.flux_a == b.flux_a && a.flux_b == b.flux_b &&
         a.field_v1 == b.field_v1 && a.field_v2 == b.field_v2 && a.initial == b.initial &&
         a.amplitude == b.amplitude && a.mean == b.mean && a.phase == b.phase &&
         a.center == b.center && a.width == b.width && a.left == b.left &&
         a.right == b.right && a.split == b.split && a.members == b.members &&
         a.solver == b.solver && a.scheme == b.scheme && a.epsilon == b.epsilon &&
         a.cfl == b.cfl && a.t_end == b.t_end && a.snapshots == b.snapshots &&
         a.dt_override == b.dt_override && a.properties == b.properties &&
         a.out_dir == b.out_dir;
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream o;
  o << "name = " << sc.name << "\n";
  o << "seed = " << sc.seed << "\n";
  o << "\n[manifold]\n";
  o << "chart = " << sc.chart << "\n";
  o << "n0 = " << sc.n0 << "\n";
  o << "n1 = " << sc.n1 << "\n";
  for (const auto& [k, v] : sc.chart_params) o << k << " = " << format17(v) << "\n";
  o << "\n[flux]\n";
  o << "family = " << sc.flux_family << "\n";
  o << "profile = " << sc.flux_profile << "\n";
  o << "field = " << sc.flux_field << "\n";
  o << "a = " << format17(sc.flux_a) << "\n";
  o << "b = " << format17(sc.flux_b) << "\n";
  o << "v1 = " << format17(sc.field_v1) << "\n";
  o << "v2 = " << format17(sc.field_v2) << "\n";
  o << "\n[initial]\n";
  o << "profile = " << sc.initial << "\n";
  o << "amplitude = " << format17(sc.amplitude) << "\n";
  o << "mean = " << format17(sc.mean) << "\n";
  o << "phase = " << format17(sc.phase) << "\n";
  o << "center = " << format17(sc.center) << "\n";
  o << "width = " << format17(sc.width) << "\n";
  o << "left = " << format17(sc.left) << "\n";
  o << "right = " << format17(sc.right) << "\n";
  o << "split = " << format17(sc.split) << "\n";
  o << "members = " << sc.members << "\n";
  o << "\n[solver]\n";
  o << "type = " << sc.solver << "\n";
  o << "scheme = " << sc.scheme << "\n";
  o << "epsilon = " << format17(sc.epsilon) << "\n";
  o << "cfl = " << format17(sc.cfl) << "\n";
  o << "t_end = " << format17(sc.t_end) << "\n";
  o << "snapshots = " << sc.snapshots << "\n";
  o << "dt_override = " << format17(sc.dt_override) << "\n";
  o << "\n[properties]\n";
  for (const auto& p : sc.properties) o << "check = " << p << "\n";
  o << "\n[output]\n";
  o << "dir = " << sc.out_dir << "\n";
  return o.str();
}

namespace {

ScalarProfile scale_profile(ScalarProfile p, double a) {
  if (a == 1.0) return p;
  if (a <= 0.0) throw FluxError("profile scale must be positive");
  auto v = p.value, d = p.deriv;
  p.value = [v, a](double u) { return a * v(u); };
  p.deriv = [d, a](double u) { return a * d(u); };
  if (p.inv_plus) {
    auto f = p.inv_plus;
    p.inv_plus = [f, a](double z) { return f(z / a); };
  }
  if (p.inv_minus) {
    auto f = p.inv_minus;
    p.inv_minus = [f, a](double z) { return f(z / a); };
  }
  return p;
}

TangentField make_field(const MetricChart& chart, const std::string& field, double v1,
                        double v2) {
  const double twopi = 2.0 * M_PI;
  if (field == "constant") {
    return [v1, v2](const Vec&) { return Vec{v1, v2}; };
  }
  if (field == "sine_mix") {
    const Vec o = chart.origin, L = chart.period;
    return [=](const Vec& x) {
      return Vec{v1 * std::sin(twopi * (x[1] - o[1]) / L[1]),
                 v2 * std::sin(twopi * (x[0] - o[0]) / L[0])};
    };
  }
  if (field == "zonal") {
    return [v2](const Vec&) { return Vec{0.0, v2}; };
  }
  if (field == "conformal") {
    const double amp = chart.params.at("amp");
    return [amp, v1, v2](const Vec& x) {
      const double phi = 1.0 + amp * std::sin(x[0]) * std::sin(x[1]);
      const double p2 = phi * phi;
      return Vec{v1 / p2, v2 / p2};
    };
  }
  throw FluxError("unknown tangent field '" + field + "'");
}

ScalarFn make_initial(const Scenario& sc, const MetricChart& chart, int member) {
  const double twopi = 2.0 * M_PI;
  const int dim = chart.dim;
  const Vec o = chart.origin, L = chart.period;
  if (sc.initial == "constant") {
    const double v = sc.mean + 0.1 * member;
    return [v](const Vec&) { return v; };
  }
  if (sc.initial == "sine") {
    const double ph = sc.phase + 0.13 * member;
    const double amp = sc.amplitude, mean = sc.mean;
    return [=](const Vec& x) {
      double s = std::sin(twopi * (x[0] - o[0]) / L[0] + ph);
      if (dim == 2) s *= std::sin(twopi * (x[1] - o[1]) / L[1]);
      return mean + amp * s;
    };
  }
  if (sc.initial == "pulse") {
    double c0 = sc.center + 0.13 * member;
    c0 -= std::floor(c0);
    const Vec ctr{o[0] + c0 * L[0], o[1] + 0.5 * L[1]};
    const Vec w{sc.width * L[0], sc.width * L[1]};
    const double amp = sc.amplitude, mean = sc.mean;
    const std::array<bool, 2> per = chart.periodic;
    return [=](const Vec& x) {
      double s2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = per[a] ? periodic_delta(x[a], ctr[a], L[a]) : x[a] - ctr[a];
        s2 += (d / w[a]) * (d / w[a]);
      }
      return mean + amp * bump(std::sqrt(s2));
    };
  }
  // riemann
  double sp = sc.split + 0.13 * member;
  sp -= std::floor(sp);
  const double left = sc.left, right = sc.right;
  return [=](const Vec& x) { return (x[0] - o[0]) / L[0] < sp ? left : right; };
}

}  // namespace

FluxFamily make_scenario_flux(const MetricChart& chart, const std::string& family,
                              const std::string& profile, const std::string& field,
                              double a, double v1, double v2) {
  ScalarProfile prof = scale_profile(make_profile(profile), a);
  if (family == "weighted_1d") {
    KFunction k{1.0, 0.0, 1.0};
    if (chart.name == "weighted_circle") {
      k = KFunction{chart.params.at("k0"), chart.params.at("k1"), chart.params.at("freq")};
    }
    return make_weighted_flux_1d(k, prof, profile + "_weighted");
  }
  if (family == "compatible_transport") {
    return make_compatible_flux(chart, make_field(chart, field, v1, v2), prof,
                                profile + "_" + field);
  }
  throw FluxError("flux family '" + family + "' has no riemannian realization");
}

BuiltScenario build_scenario(const Scenario& sc) {
  BuiltScenario bs;
  bs.sc = sc;
  bs.chart = make_chart(sc.chart, sc.chart_params);
  const int n1 = bs.chart.dim == 2 ? (sc.n1 >= 16 ? sc.n1 : sc.n0) : 1;
  bs.mesh = std::make_shared<ManifoldMesh>(build_mesh(bs.chart, sc.n0, n1));
  if (sc.solver == "lorentzian") {
    bs.lorentzian = true;
    bs.spacetime = sc.chart == "flat_circle"
                       ? make_minkowski_1_1(bs.chart.params.at("L"))
                       : make_schwarzschild_radial(bs.chart.params.at("m"),
                                                   bs.chart.params.at("r0"),
                                                   bs.chart.params.at("r1"));
    bs.tflux = sc.flux_family == "lorentzian_nonlinear"
                   ? make_lorentzian_nonlinear(bs.spacetime, sc.flux_a, sc.flux_b)
                   : make_lorentzian_transport(bs.spacetime, sc.flux_a);
  } else {
    bs.flux = make_scenario_flux(bs.chart, sc.flux_family, sc.flux_profile, sc.flux_field,
                                 sc.flux_a, sc.field_v1, sc.field_v2);
  }
  for (int m = 0; m < sc.members; ++m)
    bs.initial_data.push_back(make_initial(sc, bs.chart, m));
  return bs;
}

namespace {

SolutionTrajectory run_member(const BuiltScenario& bs, int m) {
  const Scenario& sc = bs.sc;
  const ScalarField u0 = sample_field(*bs.mesh, bs.initial_data[m]);
  if (sc.solver == "fv" || sc.solver == "oracle") {
    FVConfig c;
    c.numerical_flux = sc.scheme;
    c.cfl = sc.cfl;
    c.t_end = sc.t_end;
    c.snapshots = sc.snapshots;
    c.dt_override = sc.dt_override;
    c.range_inflation = bs.flux.compatible ? 1.0 : 1.5;
    return solve_fv(*bs.mesh, bs.flux, u0, c);
  }
  if (sc.solver == "viscous") {
    ViscousConfig c;
    c.epsilon = sc.epsilon;
    c.form = sc.scheme;
    c.cfl = sc.cfl;
    c.t_end = sc.t_end;
    c.snapshots = sc.snapshots;
    c.dt_override = sc.dt_override;
    c.range_inflation = bs.flux.compatible ? 1.0 : 1.5;
    return solve_viscous(*bs.mesh, bs.flux, u0, c);
  }
  LorentzianConfig c;
  c.mode = sc.scheme;
  c.epsilon = sc.epsilon;
  c.cfl = sc.cfl;
  c.t_end = sc.t_end;
  c.snapshots = sc.snapshots;
  c.dt_override = sc.dt_override;
  return solve_lorentzian(*bs.mesh, bs.spacetime, bs.tflux, u0, c);
}

void annotate(SolutionTrajectory& traj, const Scenario& sc, int member) {
  traj.meta["scenario"] = sc.name;
  traj.meta["seed"] = std::to_string(sc.seed);
  traj.meta["member"] = std::to_string(member);
  traj.meta["flux.family"] = sc.flux_family;
  traj.meta["flux.profile"] = sc.flux_profile;
  traj.meta["flux.field"] = sc.flux_field;
  traj.meta["flux.a"] = format17(sc.flux_a);
  traj.meta["flux.b"] = format17(sc.flux_b);
  traj.meta["flux.v1"] = format17(sc.field_v1);
  traj.meta["flux.v2"] = format17(sc.field_v2);
  traj.meta["initial.profile"] = sc.initial;
  traj.meta["initial.amplitude"] = format17(sc.amplitude);
  traj.meta["initial.mean"] = format17(sc.mean);
  traj.meta["initial.phase"] = format17(sc.phase);
  traj.meta["initial.center"] = format17(sc.center);
  traj.meta["initial.width"] = format17(sc.width);
  traj.meta["initial.left"] = format17(sc.left);
  traj.meta["initial.right"] = format17(sc.right);
  traj.meta["initial.split"] = format17(sc.split);
}

unsigned long long member_seed(unsigned long long base, int member) {
  return base + 1000003ull * static_cast<unsigned long long>(member);
}

PropertyReport tag_member(PropertyReport rep, int m) {
  rep.location = "member_" + std::to_string(m) +
                 (rep.location.empty() ? "" : ", " + rep.location);
  return rep;
}

PropertyReport tag_pair(PropertyReport rep, int i, int j) {
  rep.location = "members " + std::to_string(i) + "/" + std::to_string(j) +
                 (rep.location.empty() ? "" : ", " + rep.location);
  return rep;
}

std::vector<PropertyReport> evaluate_properties(const BuiltScenario& bs,
                                                const std::vector<SolutionTrajectory>& trajs,
                                                const std::vector<double>& drifts) {
  const Scenario& sc = bs.sc;
  auto wanted = [&](const std::string& p) {
    return sc.properties.empty() || contains(sc.properties, p);
  };
  std::vector<PropertyReport> out;
  const int n = static_cast<int>(trajs.size());
  if (!bs.lorentzian) {
    for (int m = 0; m < n; ++m) {
      const SolutionTrajectory& traj = trajs[m];
      if (wanted("lp_stability")) out.push_back(tag_member(check_lp_stability(traj, bs.flux), m));
      if (wanted("max_principle"))
        out.push_back(tag_member(check_max_principle(traj, bs.flux), m));
      if (wanted("mass_conservation"))
        out.push_back(tag_member(check_mass_conservation(traj), m));
      if (wanted("tv_envelope"))
        out.push_back(tag_member(check_tv_envelope(traj, bs.flux), m));
      if (wanted("time_lipschitz"))
        out.push_back(tag_member(check_time_lipschitz(traj, bs.flux), m));
      if (wanted("weak_entropy_solution"))
        out.push_back(tag_member(
            check_weak_entropy_solution(traj, bs.flux, member_seed(sc.seed, m)), m));
      if (sc.solver == "oracle" && wanted("characteristic_drift") &&
          m < static_cast<int>(drifts.size())) {
        PropertyReport rep;
        rep.property = "characteristic_drift";
        rep.tolerance = 0.0;
        rep.margin = 1e-8 - drifts[m];
        rep.pass = drifts[m] <= 1e-8;
        rep.note = "max |k(X) f(v) - c| = " + format17(drifts[m]) + " over 32 traces";
        out.push_back(tag_member(rep, m));
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (wanted("l1_contraction"))
          out.push_back(tag_pair(check_contraction(trajs[i], trajs[j]), i, j));
        if (wanted("kruzkov_difference"))
          out.push_back(
              tag_pair(check_kruzkov_inequality(trajs[i], trajs[j], bs.flux, sc.seed), i, j));
      }
    }
  } else {
    for (int m = 0; m < n; ++m) {
      if (wanted("timelike_margin")) {
        PropertyReport rep;
        rep.property = "timelike_margin";
        rep.tolerance = 0.0;
        double worst = 0.0;
        auto it = trajs[m].meta.find("timelike_margin");
        if (it != trajs[m].meta.end()) worst = std::strtod(it->second.c_str(), nullptr);
        rep.margin = -worst;
        rep.pass = worst < 0.0;
        rep.note = "max g(d_u f, d_u f) = " + format17(worst);
        out.push_back(tag_member(rep, m));
      }
      if (wanted("lorentzian_entropy_weak"))
        out.push_back(tag_member(check_lorentzian_entropy(trajs[m], bs.spacetime, bs.tflux,
                                                          member_seed(sc.seed, m)),
                                 m));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (wanted("foliation_contraction"))
          out.push_back(tag_pair(
              foliation_contraction_check(trajs[i], trajs[j], bs.spacetime, bs.tflux), i, j));
  }
  return out;
}

struct OracleArtifacts {
  std::vector<std::array<double, 4>> rows;  // member, t, l1, max
  std::vector<double> drifts;               // per member
  std::vector<std::vector<std::vector<double>>> states;  // member -> snapshot -> cell
};

void run_oracle_member(const BuiltScenario& bs, int m, const SolutionTrajectory& traj,
                       OracleArtifacts& art) {
  const Scenario& sc = bs.sc;
  const ManifoldMesh& mesh = *bs.mesh;
  WeightedProblem prob;
  prob.k = bs.flux.kfun;
  prob.f = bs.flux.profile;
  const ScalarFn fn = bs.initial_data[m];
  prob.u0 = [fn](double x) { return fn(Vec{x, 0.0}); };
  double lo = traj.states[0][0], hi = lo;
  for (double v : traj.states[0]) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = std::max(1e-6, hi - lo);
  prob.u_lo = lo - 0.5 * span - 0.1;
  prob.u_hi = hi + 0.5 * span + 0.1;
  prob.t_max = sc.t_end;

  std::vector<double> xs(mesh.cell_count());
  for (int c = 0; c < mesh.cell_count(); ++c) xs[c] = mesh.cells[c].center[0];

  std::vector<std::vector<double>> snaps;
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    std::vector<double> vals = smooth_solve(prob, traj.times[s], xs);
    std::vector<double> terms(mesh.cell_count());
    double mx = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
      const double d = std::abs(vals[c] - traj.states[s][c]);
      terms[c] = mesh.cells[c].volume * d;
      mx = std::max(mx, d);
    }
    art.rows.push_back({static_cast<double>(m), traj.times[s], pairwise_sum(terms), mx});
    snaps.push_back(std::move(vals));
  }
  art.states.push_back(std::move(snaps));

  double drift = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double y = mesh.chart.origin[0] + mesh.chart.period[0] * (i + 0.5) / 32.0;
    const Characteristic ch = trace_characteristic(prob, y, sc.t_end);
    drift = std::max(drift, ch.drift);
  }
  art.drifts.push_back(drift);
}

RunResult run_impl(const Scenario& sc, const std::filesystem::path* out_root) {
  RunResult rr;
  std::filesystem::path dir;
  if (out_root != nullptr) {
    dir = *out_root / (sc.out_dir.empty() ? sc.name : sc.out_dir);
    std::filesystem::create_directories(dir);
    rr.dir = dir;
    std::ofstream cfg(dir / "scenario.cfg");
    cfg << serialize_scenario(sc);
  }
  try {
    rr.built = build_scenario(sc);
    OracleArtifacts oracle;
    for (int m = 0; m < sc.members; ++m) {
      SolutionTrajectory traj = run_member(rr.built, m);
      annotate(traj, sc, m);
      if (sc.solver == "oracle") run_oracle_member(rr.built, m, traj, oracle);
      if (out_root != nullptr) {
        const std::filesystem::path mdir = dir / ("member_" + std::to_string(m));
        write_trajectory(traj, mdir);
        if (sc.solver == "oracle") {
          for (std::size_t s = 0; s < oracle.states[m].size(); ++s) {
            char name[32];
            std::snprintf(name, sizeof(name), "oracle_%04zu.csv", s);
            std::vector<std::vector<double>> rows;
            for (std::size_t c = 0; c < oracle.states[m][s].size(); ++c)
              rows.push_back({static_cast<double>(c), oracle.states[m][s][c]});
            write_csv(mdir / name, "cell,value", rows);
          }
        }
      }
      rr.trajectories.push_back(std::move(traj));
    }
    rr.oracle_rows = oracle.rows;
    rr.reports = evaluate_properties(rr.built, rr.trajectories, oracle.drifts);
    if (out_root != nullptr) {
      write_property_reports(dir, rr.reports);
      if (sc.solver == "oracle") {
        std::vector<std::vector<double>> rows;
        for (const auto& r : oracle.rows) rows.push_back({r[0], r[1], r[2], r[3]});
        write_csv(dir / "oracle_compare.csv", "member,t,l1_diff,max_diff", rows);
      }
    }
  } catch (const std::exception& e) {
    rr.aborted = true;
    rr.diagnostic = e.what();
    if (out_root != nullptr) {
      std::ofstream diag(dir / "diagnostic.txt");
      diag << e.what() << "\n";
    }
  }
  return rr;
}

}  // namespace

bool RunResult::pass() const {
  if (aborted) return false;
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

RunResult run_scenario(const Scenario& sc, const std::filesystem::path& out_root) {
  return run_impl(sc, &out_root);
}

RunResult run_scenario_memory(const Scenario& sc) { return run_impl(sc, nullptr); }

std::filesystem::path default_out_root() {
  const char* env = std::getenv("MCL_OUT_ROOT");
  return env != nullptr && *env != '\0' ? std::filesystem::path(env)
                                        : std::filesystem::path("out");
}

std::vector<PropertyReport> verify_directory(const std::filesystem::path& dir) {
  const LoadedTrajectory lt = read_trajectory(dir);
  const auto& meta = lt.traj.meta;
  auto gets = [&](const std::string& k, const std::string& dflt) {
    auto it = meta.find(k);
    return it == meta.end() ? dflt : it->second;
  };
  auto getd = [&](const std::string& k, double dflt) {
    auto it = meta.find(k);
    return it == meta.end() ? dflt : std::strtod(it->second.c_str(), nullptr);
  };
  unsigned long long seed = 1;
  to_seed(gets("seed", "1"), seed);
  int member = 0;
  to_int(gets("member", "0"), member);
  seed = member_seed(seed, member);
  const std::string scheme = gets("scheme", "");

  std::vector<PropertyReport> out;
  if (scheme.rfind("lorentzian", 0) == 0) {
    const MetricChart& ch = lt.mesh->chart;
    const FoliatedSpacetime st =
        ch.name == "flat_circle"
            ? make_minkowski_1_1(ch.params.at("L"))
            : make_schwarzschild_radial(ch.params.at("m"), ch.params.at("r0"),
                                        ch.params.at("r1"));
    const double a = getd("flux.a", 0.5), b = getd("flux.b", 0.0);
    const TimelikeFlux tf = gets("flux.family", "lorentzian_transport") ==
                                    "lorentzian_nonlinear"
                                ? make_lorentzian_nonlinear(st, a, b)
                                : make_lorentzian_transport(st, a);
    double lo = lt.traj.states[0][0], hi = lo;
    for (const auto& state : lt.traj.states)
      for (double v : state) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    const double worst = check_timelike(tf, st, lo, hi);
    PropertyReport rep;
    rep.property = "timelike_margin";
    rep.tolerance = 0.0;
    rep.margin = -worst;
    rep.pass = worst < 0.0;
    rep.note = "max g(d_u f, d_u f) = " + format17(worst);
    out.push_back(rep);
    out.push_back(check_lorentzian_entropy(lt.traj, st, tf, seed));
    return out;
  }

  const FluxFamily flux = make_scenario_flux(
      lt.mesh->chart, gets("flux.family", "compatible_transport"),
      gets("flux.profile", "burgers"), gets("flux.field", "constant"), getd("flux.a", 1.0),
      getd("flux.v1", 1.0), getd("flux.v2", 0.0));
  out.push_back(check_lp_stability(lt.traj, flux));
  out.push_back(check_max_principle(lt.traj, flux));
  out.push_back(check_mass_conservation(lt.traj));
  out.push_back(check_tv_envelope(lt.traj, flux));
  out.push_back(check_time_lipschitz(lt.traj, flux));
  out.push_back(check_weak_entropy_solution(lt.traj, flux, seed));
  return out;
}

}  // namespace mcl
