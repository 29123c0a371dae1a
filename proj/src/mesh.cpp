#include "mcl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcl/numerics.hpp"

namespace mcl {

int ManifoldMesh::neighbor(int id, int axis, int dir) const {
  const int i = id % n[0];
  const int j = id / n[0];
  int c = axis == 0 ? i : j;
  c += dir;
  const int count = n[axis];
  if (c < 0 || c >= count) {
    if (!chart.periodic[axis]) return -1;
    c = (c % count + count) % count;
  }
  return axis == 0 ? cell_id(c, j) : cell_id(i, c);
}

double ManifoldMesh::min_spacing() const {
  double m = dx[0];
  if (dim() == 2) m = std::min(m, dx[1]);
  return m;
}

double ManifoldMesh::total_volume() const {
  std::vector<double> vols(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) vols[i] = cells[i].volume;
  return pairwise_sum(vols);
}

namespace {

// Outward unit normal along +axis: nu^i = g^{ia} / sqrt(g^{aa}).
Vec face_normal(const MetricChart& chart, const Vec& x, int axis) {
  const Mat ginv = metric_inverse(metric_at(chart, x), chart.dim);
  const double gaa = ginv[axis][axis];
  Vec nu{0.0, 0.0};
  for (int i = 0; i < chart.dim; ++i) nu[i] = ginv[i][axis] / std::sqrt(gaa);
  return nu;
}

double face_area(const MetricChart& chart, const Vec& x, int axis, const Vec& dx) {
  if (chart.dim == 1) return 1.0;  // points carry counting measure
  const int b = 1 - axis;
  const Mat g = metric_at(chart, x);
  return std::sqrt(g[b][b]) * dx[b];
}

}  // namespace

ManifoldMesh build_mesh(const MetricChart& chart, int n0, int n1) {
  if (n0 < 2 || (chart.dim == 2 && n1 < 2)) {
    throw GeometryError("build_mesh: need at least 2 cells per axis");
  }
  ManifoldMesh mesh;
  mesh.chart = chart;
  mesh.n = {n0, chart.dim == 2 ? n1 : 1};
  mesh.dx = {chart.period[0] / mesh.n[0],
             chart.dim == 2 ? chart.period[1] / mesh.n[1] : 0.0};

  const int total = mesh.n[0] * mesh.n[1];
  mesh.cells.resize(total);
  mesh.geom.resize(total);
  mesh.cell_faces.assign(total, {});

  const double cell_dx = mesh.dx[0] * (chart.dim == 2 ? mesh.dx[1] : 1.0);
  for (int j = 0; j < mesh.n[1]; ++j) {
    for (int i = 0; i < mesh.n[0]; ++i) {
      const int id = mesh.cell_id(i, j);
      Cell& cell = mesh.cells[id];
      cell.center = {chart.origin[0] + (i + 0.5) * mesh.dx[0],
                     chart.dim == 2 ? chart.origin[1] + (j + 0.5) * mesh.dx[1] : 0.0};
      CellGeometry& cg = mesh.geom[id];
      cg.g = metric_at(chart, cell.center);
      cg.ginv = metric_inverse(cg.g, chart.dim);
      cg.sqrtg = std::sqrt(metric_det(cg.g, chart.dim));
      cg.gamma = christoffel(chart, cell.center);
      cell.volume = cg.sqrtg * cell_dx;  // midpoint quadrature
    }
  }

  auto add_face = [&mesh, &chart](int axis, int left, int right, const Vec& center) {
    Face f;
    f.axis = axis;
    f.left = left;
    f.right = right;
    f.center = center;
    f.area = face_area(chart, center, axis, mesh.dx);
    f.normal = face_normal(chart, center, axis);
    f.boundary = left < 0 || right < 0;
    const int idx = static_cast<int>(mesh.faces.size());
    mesh.faces.push_back(f);
    if (left >= 0) mesh.cell_faces[left].push_back({idx, +1});
    if (right >= 0) mesh.cell_faces[right].push_back({idx, -1});
  };

  for (int axis = 0; axis < chart.dim; ++axis) {
    for (int j = 0; j < mesh.n[1]; ++j) {
      for (int i = 0; i < mesh.n[0]; ++i) {
        const int id = mesh.cell_id(i, j);
        const Cell& cell = mesh.cells[id];
        Vec fc = cell.center;
        fc[axis] += 0.5 * mesh.dx[axis];
        const int nbr = mesh.neighbor(id, axis, +1);
        if (nbr >= 0) {
          add_face(axis, id, nbr, fc);
        } else {
          add_face(axis, id, -1, fc);  // closed band edge
        }
        // Leading band edge gets its own boundary face.
        const int coord = axis == 0 ? i : j;
        if (!chart.periodic[axis] && coord == 0) {
          Vec bc = cell.center;
          bc[axis] -= 0.5 * mesh.dx[axis];
          add_face(axis, -1, id, bc);
        }
      }
    }
  }
  return mesh;
}

ScalarField sample_field(const ManifoldMesh& mesh, const ScalarFn& fn) {
  ScalarField u;
  u.mesh = &mesh;
  u.values.resize(mesh.cell_count());
  for (int i = 0; i < mesh.cell_count(); ++i) u.values[i] = fn(mesh.cells[i].center);
  return u;
}

double lp_norm(const ScalarField& u, double p) {
  if (!(p >= 1.0)) throw SolverError("lp_norm: p must be >= 1");
  const auto& cells = u.mesh->cells;
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
  }
  std::vector<double> terms(u.values.size());
  for (size_t i = 0; i < u.values.size(); ++i) {
    terms[i] = cells[i].volume * std::pow(std::abs(u.values[i]), p);
  }
  return std::pow(pairwise_sum(terms), 1.0 / p);
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
  if (a.mesh != b.mesh || a.values.size() != b.values.size()) {
    throw SolverError("l1_distance: fields live on different meshes");
  }
  const auto& cells = a.mesh->cells;
  std::vector<double> terms(a.values.size());
  for (size_t i = 0; i < a.values.size(); ++i) {
    terms[i] = cells[i].volume * std::abs(a.values[i] - b.values[i]);
  }
  return pairwise_sum(terms);
}

double total_variation(const ScalarField& u) {
  const ManifoldMesh& mesh = *u.mesh;
  std::vector<double> terms;
  terms.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    if (f.boundary) continue;
    terms.push_back(f.area * std::abs(u.values[f.right] - u.values[f.left]));
  }
  return pairwise_sum(terms);
}

double integrate_field(const ScalarField& u) {
  const auto& cells = u.mesh->cells;
  std::vector<double> terms(u.values.size());
  for (size_t i = 0; i < u.values.size(); ++i) terms[i] = cells[i].volume * u.values[i];
  return pairwise_sum(terms);
}

}  // namespace mcl
