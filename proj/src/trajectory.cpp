#include "mcl/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace mcl {

namespace {

// Not std::stod: glibc reports ERANGE for subnormals and stod turns that into
// a throw, so a stored pulse tail (~1e-315) would make a file unreadable.
double parse_double(const std::string& s, const std::filesystem::path& file) {
  const char* c = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(c, &end);
  if (end == c) {
    throw SolverError("bad numeric field '" + s + "' in '" + file.string() + "'");
  }
  return v;
}

}  // namespace

std::vector<NormRow> norm_series(const SolutionTrajectory& traj) {
  std::vector<NormRow> rows;
  rows.reserve(traj.times.size());
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const ScalarField u = traj.at(i);
    NormRow r;
    r.t = traj.times[i];
    r.l1 = lp_norm(u, 1.0);
    r.l2 = lp_norm(u, 2.0);
    r.linf = lp_norm(u, std::numeric_limits<double>::infinity());
    r.tv = total_variation(u);
    rows.push_back(r);
  }
  return rows;
}

void write_csv(const std::filesystem::path& file, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(file);
  if (!out) throw SolverError("cannot open '" + file.string() + "' for writing");
  out << header << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format17(row[i]);
    }
    out << "\n";
  }
}

void write_trajectory(const SolutionTrajectory& traj, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (size_t s = 0; s < traj.states.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%04zu.csv", s);
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.states[s].size());
    for (size_t i = 0; i < traj.states[s].size(); ++i) {
      rows.push_back({static_cast<double>(i), traj.states[s][i]});
    }
    write_csv(dir / name, "cell,value", rows);
  }

  std::vector<std::vector<double>> norm_rows;
  for (const NormRow& r : norm_series(traj)) {
    norm_rows.push_back({r.t, r.l1, r.l2, r.linf, r.tv});
  }
  write_csv(dir / "norms.csv", "t,l1,l2,linf,tv", norm_rows);

  std::ofstream meta(dir / "trajectory.meta");
  if (!meta) throw SolverError("cannot write trajectory.meta in '" + dir.string() + "'");
  std::map<std::string, std::string> all = traj.meta;
  all["snapshot_count"] = std::to_string(traj.times.size());
  all["cell_count"] = std::to_string(traj.mesh->cell_count());
  all["chart"] = traj.mesh->chart.name;
  all["n0"] = std::to_string(traj.mesh->n[0]);
  all["n1"] = std::to_string(traj.mesh->n[1]);
  for (const auto& [key, val] : traj.mesh->chart.params) {
    all["chart." + key] = format17(val);
  }
  std::string times;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    if (i) times += " ";
    times += format17(traj.times[i]);
  }
  all["times"] = times;
  for (const auto& [key, val] : all) meta << key << " = " << val << "\n";
}

namespace {

std::map<std::string, std::string> read_meta(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SolverError("cannot read '" + file.string() + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(val);
    kv[key] = val;
  }
  return kv;
}

std::vector<double> read_snapshot(const std::filesystem::path& file, int cells) {
  std::ifstream in(file);
  if (!in) throw SolverError("cannot read '" + file.string() + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> values(cells, 0.0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const int idx = std::stoi(line.substr(0, comma));
    values.at(idx) = parse_double(line.substr(comma + 1), file);
  }
  return values;
}

}  // namespace

LoadedTrajectory read_trajectory(const std::filesystem::path& dir) {
  const auto kv = read_meta(dir / "trajectory.meta");
  std::map<std::string, double> params;
  for (const auto& [key, val] : kv) {
    if (key.rfind("chart.", 0) == 0)
      params[key.substr(6)] = parse_double(val, dir / "trajectory.meta");
  }
  const MetricChart chart = make_chart(kv.at("chart"), params);
  const int n0 = std::stoi(kv.at("n0"));
  const int n1 = std::stoi(kv.at("n1"));

  LoadedTrajectory out;
  out.mesh = std::make_shared<ManifoldMesh>(build_mesh(chart, n0, chart.dim == 2 ? n1 : 1));
  out.traj.mesh = out.mesh.get();
  out.traj.meta = kv;

  std::istringstream times(kv.at("times"));
  double t;
  while (times >> t) out.traj.times.push_back(t);

  const int count = std::stoi(kv.at("snapshot_count"));
  for (int s = 0; s < count; ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%04d.csv", s);
    out.traj.states.push_back(read_snapshot(dir / name, out.mesh->cell_count()));
  }
  if (out.traj.states.size() != out.traj.times.size()) {
    throw SolverError("trajectory in '" + dir.string() + "' has mismatched snapshot count");
  }
  return out;
}

}  // namespace mcl
