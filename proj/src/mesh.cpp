#include "nsopt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "nsopt/errors.hpp"

namespace nsopt {

double Mesh::cell_area(int c) const {
  const auto& t = cells[c];
  const Vec2 a = vertices[t[1]] - vertices[t[0]];
  const Vec2 b = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Vec2 Mesh::cell_centroid(int c) const {
  const auto& t = cells[c];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

Eigen::Matrix2d Mesh::cell_jacobian(int c) const {
  const auto& t = cells[c];
  Eigen::Matrix2d J;
  J.col(0) = vertices[t[1]] - vertices[t[0]];
  J.col(1) = vertices[t[2]] - vertices[t[0]];
  return J;
}

namespace {

void build_edges(Mesh& m) {
  std::map<std::pair<int, int>, int> edge_index;
  m.cell_edges.resize(m.cells.size());
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto& t = m.cells[c];
    for (int le = 0; le < 3; ++le) {
      int a = t[le], b = t[(le + 1) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_index.find(key);
      if (it == edge_index.end()) {
        int idx = static_cast<int>(m.edges.size());
        m.edges.push_back({key.first, key.second, c, -1});
        edge_index.emplace(key, idx);
        m.cell_edges[c][le] = idx;
      } else {
        m.edges[it->second].cell_right = c;
        m.cell_edges[c][le] = it->second;
      }
    }
  }
  m.edge_on_boundary.assign(m.edges.size(), false);
  m.vertex_on_boundary.assign(m.vertices.size(), false);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edges[e].cell_right == -1) {
      m.edge_on_boundary[e] = true;
      m.vertex_on_boundary[m.edges[e].v0] = true;
      m.vertex_on_boundary[m.edges[e].v1] = true;
    }
  }
}

}  // namespace

Mesh build_structured(int nx, int ny, const std::array<double, 4>& rect) {
  if (nx < 1 || ny < 1) throw InputError("build_structured: nx, ny must be >= 1");
  const double x0 = rect[0], y0 = rect[1], x1 = rect[2], y1 = rect[3];
  if (!(x1 > x0) || !(y1 > y0)) throw InputError("build_structured: degenerate rectangle");

  Mesh m;
  m.nx = nx;
  m.ny = ny;
  m.rect = rect;
  const double hx = (x1 - x0) / nx, hy = (y1 - y0) / ny;

  m.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(x0 + i * hx, y0 + j * hy);

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.cells.reserve(static_cast<size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.cells.push_back({v00, v10, v11});  // lower triangle
      m.cells.push_back({v00, v11, v01});  // upper triangle
    }
  }

  build_edges(m);
  const double diam = std::sqrt(hx * hx + hy * hy);
  m.h_max = diam;
  m.h_min = diam;
  return m;
}

Mesh refine_uniform(const Mesh& m) {
  return build_structured(2 * m.nx, 2 * m.ny, m.rect);
}

std::array<double, 3> barycentric_coordinates(const Mesh& m, int cell, const Vec2& p) {
  const auto& t = m.cells[cell];
  const Vec2& p0 = m.vertices[t[0]];
  const Eigen::Matrix2d J = m.cell_jacobian(cell);
  const Vec2 xi = J.inverse() * (p - p0);
  return {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
}

namespace {

constexpr double kLocateTol = 1e-12;

bool contains(const std::array<double, 3>& bc) {
  return bc[0] >= -kLocateTol && bc[1] >= -kLocateTol && bc[2] >= -kLocateTol;
}

}  // namespace

PointLocation locate_point(const Mesh& m, const Vec2& p) {
  if (m.nx > 0) {
    // Structured fast path: candidate squares around the grid cell of p,
    // scanned in cell-index order so edge/vertex ties resolve to the
    // smallest containing index, matching the exhaustive scan.
    const double hx = (m.rect[2] - m.rect[0]) / m.nx;
    const double hy = (m.rect[3] - m.rect[1]) / m.ny;
    const int ix = static_cast<int>(std::floor((p.x() - m.rect[0]) / hx));
    const int iy = static_cast<int>(std::floor((p.y() - m.rect[1]) / hy));
    for (int j = std::max(0, iy - 1); j <= std::min(m.ny - 1, iy + 1); ++j) {
      for (int i = std::max(0, ix - 1); i <= std::min(m.nx - 1, ix + 1); ++i) {
        const int base = 2 * (j * m.nx + i);
        for (int c = base; c < base + 2; ++c) {
          auto bc = barycentric_coordinates(m, c, p);
          if (contains(bc)) return {c, bc};
        }
      }
    }
  } else {
    for (int c = 0; c < m.num_cells(); ++c) {
      auto bc = barycentric_coordinates(m, c, p);
      if (contains(bc)) return {c, bc};
    }
  }
  throw OutOfDomainError("locate_point: point outside the domain");
}

void write_vtk(const Mesh& m, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<Vec2>>>& vector_data,
               const std::vector<std::pair<std::string, std::vector<double>>>& scalar_data) {
  std::ofstream out(path);
  if (!out) throw InputError("write_vtk: cannot open " + path);
  char buf[96];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "# vtk DataFile Version 3.0\nnsopt mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << m.num_vertices() << " double\n";
  for (const auto& v : m.vertices)
    out << fmt(v.x()) << " " << fmt(v.y()) << " 0\n";
  out << "CELLS " << m.num_cells() << " " << 4 * m.num_cells() << "\n";
  for (const auto& c : m.cells)
    out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "CELL_TYPES " << m.num_cells() << "\n";
  for (int c = 0; c < m.num_cells(); ++c) out << "5\n";
  if (!vector_data.empty() || !scalar_data.empty()) {
    out << "POINT_DATA " << m.num_vertices() << "\n";
    for (const auto& [name, values] : vector_data) {
      out << "VECTORS " << name << " double\n";
      for (const auto& v : values)
        out << fmt(v.x()) << " " << fmt(v.y()) << " 0\n";
    }
    for (const auto& [name, values] : scalar_data) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : values) out << fmt(v) << "\n";
    }
  }
}

}  // namespace nsopt
