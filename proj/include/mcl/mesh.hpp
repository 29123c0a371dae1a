#pragma once

#include <vector>

#include "mcl/geometry.hpp"

namespace mcl {

struct Cell {
  Vec center{0.0, 0.0};
  double volume = 0.0;
};

/// Face between `left` and its +axis neighbor `right`. Band edges are stored
/// with right = -1 (closed, zero normal flux). `normal` is the outward unit
/// normal of the left cell, g(normal, normal) = 1.
struct Face {
  int axis = 0;
  int left = -1;
  int right = -1;
  Vec center{0.0, 0.0};
  double area = 1.0;
  Vec normal{1.0, 0.0};
  bool boundary = false;
};

/// Per-cell geometry cache used by the stencil solvers.
struct CellGeometry {
  Mat g{};
  Mat ginv{};
  double sqrtg = 1.0;
  ChristoffelSymbols gamma;
};

/// Structured cell-centered mesh on a chart rectangle. Periodic axes wrap;
/// band axes terminate in boundary faces.
struct ManifoldMesh {
  MetricChart chart;
  std::array<int, 2> n{1, 1};
  Vec dx{0.0, 0.0};
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<CellGeometry> geom;
  /// Per cell: (face index, +1 when the cell is the face's left side).
  std::vector<std::vector<std::pair<int, int>>> cell_faces;

  int dim() const { return chart.dim; }
  int cell_count() const { return static_cast<int>(cells.size()); }
  int cell_id(int i, int j) const { return i + n[0] * j; }
  /// Neighbor in direction dir = +-1 along axis; -1 past a band edge.
  int neighbor(int id, int axis, int dir) const;
  double min_spacing() const;
  double total_volume() const;
};

ManifoldMesh build_mesh(const MetricChart& chart, int n0, int n1 = 1);

struct ScalarField {
  const ManifoldMesh* mesh = nullptr;
  std::vector<double> values;
};

ScalarField sample_field(const ManifoldMesh& mesh, const ScalarFn& fn);

/// (sum vol |u|^p)^(1/p); p = infinity() gives the max norm. Requires p >= 1.
double lp_norm(const ScalarField& u, double p);
double l1_distance(const ScalarField& a, const ScalarField& b);

/// Face-jump total variation: sum over interior faces of area * |u_R - u_L|.
double total_variation(const ScalarField& u);

/// sum vol * u (the conserved discrete mass).
double integrate_field(const ScalarField& u);

}  // namespace mcl
