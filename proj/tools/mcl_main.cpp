// mcl-lab: run scenarios, re-check stored runs, and compare trajectories.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mcl/numerics.hpp"
#include "mcl/scenario.hpp"

namespace {

void print_reports(const std::vector<mcl::PropertyReport>& reports) {
  for (const auto& r : reports) {
    const char* status = !r.applicable ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    std::printf("[%s] %-24s margin=% .6e tol=%.3e", status, r.property.c_str(), r.margin,
                r.tolerance);
    if (!r.location.empty()) std::printf("  at %s", r.location.c_str());
    if (!r.note.empty()) std::printf("  (%s)", r.note.c_str());
    std::printf("\n");
  }
}

int finish_run(const mcl::RunResult& rr) {
  if (rr.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", rr.diagnostic.c_str());
    if (!rr.dir.empty())
      std::fprintf(stderr, "diagnostic written to %s\n",
                   (rr.dir / "diagnostic.txt").string().c_str());
    return 2;
  }
  print_reports(rr.reports);
  if (!rr.dir.empty()) std::printf("artifacts: %s\n", rr.dir.string().c_str());
  const bool ok = rr.pass();
  std::printf("%s\n", ok ? "all properties hold" : "PROPERTY FAILURE");
  return ok ? 0 : 1;
}

int cmd_run(const std::string& cfg, const std::string& out_root, bool oracle_only) {
  const mcl::Scenario sc = mcl::parse_scenario_file(cfg);
  if (oracle_only && sc.solver != "oracle") {
    std::fprintf(stderr, "scenario '%s' has solver type '%s'; the oracle command needs "
                         "type = oracle\n",
                 sc.name.c_str(), sc.solver.c_str());
    return 2;
  }
  const std::filesystem::path root =
      out_root.empty() ? mcl::default_out_root() : std::filesystem::path(out_root);
  return finish_run(mcl::run_scenario(sc, root));
}

int cmd_verify(const std::string& dir) {
  const auto reports = mcl::verify_directory(dir);
  print_reports(reports);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  std::printf("%s\n", ok ? "stored run verifies" : "PROPERTY FAILURE");
  return ok ? 0 : 1;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, const std::string& p) {
  const mcl::LoadedTrajectory a = mcl::read_trajectory(dir_a);
  const mcl::LoadedTrajectory b = mcl::read_trajectory(dir_b);
  if (a.mesh->chart.name != b.mesh->chart.name ||
      a.mesh->cell_count() != b.mesh->cell_count()) {
    throw mcl::SolverError("cannot compare: runs live on different meshes (" +
                           a.mesh->chart.name + " with " +
                           std::to_string(a.mesh->cell_count()) + " cells vs " +
                           b.mesh->chart.name + " with " +
                           std::to_string(b.mesh->cell_count()) + " cells)");
  }
  const std::size_t n = std::min(a.traj.times.size(), b.traj.times.size());
  std::printf("t,distance\n");
  for (std::size_t s = 0; s < n; ++s) {
    if (std::abs(a.traj.times[s] - b.traj.times[s]) > 1e-12 * (1.0 + a.traj.times[s])) {
      throw mcl::SolverError("cannot compare: snapshot times differ at index " +
                             std::to_string(s));
    }
    std::vector<double> terms(a.mesh->cell_count());
    double dist = 0.0;
    if (p == "inf") {
      for (int c = 0; c < a.mesh->cell_count(); ++c)
        dist = std::max(dist, std::abs(a.traj.states[s][c] - b.traj.states[s][c]));
    } else {
      const double pw = p == "2" ? 2.0 : 1.0;
      for (int c = 0; c < a.mesh->cell_count(); ++c) {
        const double d = std::abs(a.traj.states[s][c] - b.traj.states[s][c]);
        terms[c] = a.mesh->cells[c].volume * std::pow(d, pw);
      }
      dist = mcl::pairwise_sum(terms);
      if (pw == 2.0) dist = std::sqrt(dist);
    }
    std::printf("%s,%s\n", mcl::format17(a.traj.times[s]).c_str(),
                mcl::format17(dist).c_str());
  }
  return 0;
}

int cmd_mesh_dump(const std::string& cfg) {
  const mcl::Scenario sc = mcl::parse_scenario_file(cfg);
  const mcl::BuiltScenario bs = mcl::build_scenario(sc);
  std::printf("cell,center0,center1,volume\n");
  for (int c = 0; c < bs.mesh->cell_count(); ++c) {
    const auto& cell = bs.mesh->cells[c];
    std::printf("%d,%s,%s,%s\n", c, mcl::format17(cell.center[0]).c_str(),
                mcl::format17(cell.center[1]).c_str(),
                mcl::format17(cell.volume).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for conservation laws on curved manifolds"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");
  std::string out_root;
  app.add_option("--out-root", out_root, "artifact root (default $MCL_OUT_ROOT or ./out)");

  std::string run_cfg;
  CLI::App* run = app.add_subcommand("run", "run a scenario config and check properties");
  run->add_option("config", run_cfg, "scenario .cfg file")->required();

  std::string verify_dir;
  CLI::App* verify =
      app.add_subcommand("verify", "re-check properties of a stored trajectory");
  verify->add_option("trajectory", verify_dir, "member directory of a stored run")
      ->required();

  std::string cmp_a, cmp_b, cmp_p = "1";
  CLI::App* compare =
      app.add_subcommand("compare", "print L^p distance between two stored runs");
  compare->add_option("a", cmp_a, "first member directory")->required();
  compare->add_option("b", cmp_b, "second member directory")->required();
  compare->add_option("--p", cmp_p, "norm exponent")
      ->check(CLI::IsMember({"1", "2", "inf"}));

  std::string oracle_cfg;
  CLI::App* oracle =
      app.add_subcommand("oracle", "run a weighted 1D scenario against the exact solver");
  oracle->add_option("config", oracle_cfg, "scenario .cfg file with type = oracle")
      ->required();

  std::string mesh_cfg;
  CLI::App* mesh = app.add_subcommand("mesh-dump", "print the cell table of a scenario mesh");
  mesh->add_option("config", mesh_cfg, "scenario .cfg file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  mcl::set_max_threads(threads > 0 ? threads : std::max(1, hw));

  try {
    if (*run) return cmd_run(run_cfg, out_root, false);
    if (*verify) return cmd_verify(verify_dir);
    if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_p);
    if (*oracle) return cmd_run(oracle_cfg, out_root, true);
    if (*mesh) return cmd_mesh_dump(mesh_cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
