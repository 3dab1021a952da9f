#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace nsopt {

using Vec2 = Eigen::Vector2d;

/// Conforming triangulation of an axis-aligned rectangle. Each nx-by-ny grid
/// square is split by the diagonal from its lower-left to its upper-right
/// corner; the lower triangle precedes the upper one in the cell ordering.
/// Vertices are numbered row-major. Immutable after construction.
struct Mesh {
  struct Edge {
    int v0, v1;                //< v0 < v1
    int cell_left, cell_right; //< adjacent cells, cell_right == -1 on the boundary
  };

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells;  //< counterclockwise vertex triples
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> cell_edges;  //< edge index for local edges (0,1),(1,2),(2,0)
  std::vector<bool> vertex_on_boundary;
  std::vector<bool> edge_on_boundary;
  double h_max = 0.0;
  double h_min = 0.0;

  // structured-grid parameters, used by refine_uniform and fast point location
  int nx = 0, ny = 0;
  std::array<double, 4> rect{0, 0, 1, 1};  //< x0, y0, x1, y1

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double cell_area(int c) const;
  Vec2 cell_centroid(int c) const;
  /// Columns of the Jacobian of the affine reference map for cell c.
  Eigen::Matrix2d cell_jacobian(int c) const;
};

struct PointLocation {
  int cell_index;
  std::array<double, 3> barycentric;
};

Mesh build_structured(int nx, int ny, const std::array<double, 4>& rect = {0, 0, 1, 1});

/// Equivalent to build_structured(2*nx, 2*ny, rect); h_max halves exactly.
Mesh refine_uniform(const Mesh& m);

/// Finds a cell containing p, with barycentric coordinates. Points on shared
/// edges or vertices resolve to the containing cell of smallest index.
/// Throws OutOfDomainError for p outside the closed domain.
PointLocation locate_point(const Mesh& m, const Vec2& p);

std::array<double, 3> barycentric_coordinates(const Mesh& m, int cell, const Vec2& p);

/// Legacy ASCII VTK export (UNSTRUCTURED_GRID), 17 significant digits.
/// point_data may be empty; each entry is (name, per-vertex values with
/// 1 (scalar) or 2 (vector) components).
void write_vtk(const Mesh& m, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<Vec2>>>& vector_data = {},
               const std::vector<std::pair<std::string, std::vector<double>>>& scalar_data = {});

}  // namespace nsopt
