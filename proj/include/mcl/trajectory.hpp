#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mcl/mesh.hpp"

namespace mcl {

/// Snapshots of one solver run. `meta` records everything needed to rebuild
/// the mesh and flux by name (scheme, epsilon, cfl, dt, chart params, ...).
struct SolutionTrajectory {
  const ManifoldMesh* mesh = nullptr;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::map<std::string, std::string> meta;

  ScalarField at(size_t i) const {
    return ScalarField{mesh, states.at(i)};
  }
};

struct NormRow {
  double t = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double tv = 0.0;
};

std::vector<NormRow> norm_series(const SolutionTrajectory& traj);

/// Writes snap_XXXX.csv files, norms.csv and trajectory.meta into dir.
/// All floats use 17 significant digits; output is byte deterministic.
void write_trajectory(const SolutionTrajectory& traj, const std::filesystem::path& dir);

/// Loaded trajectory owns its mesh (reconstructed from the meta block).
struct LoadedTrajectory {
  std::shared_ptr<ManifoldMesh> mesh;
  SolutionTrajectory traj;
};

LoadedTrajectory read_trajectory(const std::filesystem::path& dir);

void write_csv(const std::filesystem::path& file, const std::string& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace mcl
