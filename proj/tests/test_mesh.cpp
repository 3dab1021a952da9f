#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "nsopt/errors.hpp"
#include "nsopt/mesh.hpp"

using namespace nsopt;

namespace {

void check_invariants(const Mesh& m) {
  for (int c = 0; c < m.num_cells(); ++c) CHECK(m.cell_area(c) > 0.0);
  // Euler relation for a simply connected planar triangulation
  CHECK(m.num_vertices() - m.num_edges() + m.num_cells() + 1 == 2);
  CHECK(m.h_max / m.h_min <= 4.0);
  // conformity: each edge is shared by at most two cells, and cell_edges is
  // consistent with the vertex triples
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto& t = m.cells[c];
    for (int le = 0; le < 3; ++le) {
      const auto& e = m.edges[m.cell_edges[c][le]];
      const std::set<int> got{e.v0, e.v1};
      const std::set<int> want{t[le], t[(le + 1) % 3]};
      CHECK(got == want);
      CHECK((e.cell_left == c || e.cell_right == c));
    }
  }
}

}  // namespace

TEST_CASE("structured 1x1 mesh: minimal diagonal split") {
  const Mesh m = build_structured(1, 1);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_cells() == 2);
  CHECK(m.num_edges() == 5);
  check_invariants(m);
}

TEST_CASE("structured 2x2 mesh: counts and Euler relation") {
  const Mesh m = build_structured(2, 2);
  CHECK(m.num_vertices() == 9);
  CHECK(m.num_cells() == 8);
  CHECK(m.num_edges() == 16);
  CHECK(9 - 16 + 8 + 1 == 2);
  check_invariants(m);
}

TEST_CASE("structured mesh rejects invalid sizes and rectangles") {
  CHECK_THROWS_AS(build_structured(0, 1), InputError);
  CHECK_THROWS_AS(build_structured(2, 2, {0, 0, 0, 1}), InputError);
}

TEST_CASE("uniform refinement doubles resolution") {
  const Mesh coarse = build_structured(1, 1);
  const Mesh fine = refine_uniform(coarse);
  const Mesh direct = build_structured(2, 2);
  REQUIRE(fine.num_vertices() == direct.num_vertices());
  REQUIRE(fine.num_cells() == direct.num_cells());
  for (int v = 0; v < fine.num_vertices(); ++v)
    CHECK((fine.vertices[v] - direct.vertices[v]).norm() == 0.0);
  for (int c = 0; c < fine.num_cells(); ++c) CHECK(fine.cells[c] == direct.cells[c]);
  CHECK(fine.h_max == doctest::Approx(coarse.h_max / 2).epsilon(1e-15));
  CHECK(fine.num_cells() == 4 * coarse.num_cells());
}

TEST_CASE("point location with barycentric oracle") {
  const Mesh m = build_structured(1, 1);
  // oracle: compute barycentric coordinates in both cells directly
  const PointLocation loc = locate_point(m, {0.6, 0.2});
  CHECK(loc.cell_index == 0);
  const auto bary = barycentric_coordinates(m, 0, {0.6, 0.2});
  for (int i = 0; i < 3; ++i) {
    CHECK(bary[i] >= 0.0);
    CHECK(loc.barycentric[i] == doctest::Approx(bary[i]).epsilon(1e-14));
  }
  // a point strictly inside cell 1 has a negative coordinate w.r.t. cell 0
  const auto bary_up = barycentric_coordinates(m, 0, {0.2, 0.6});
  CHECK((bary_up[0] < 0 || bary_up[1] < 0 || bary_up[2] < 0));
  CHECK(locate_point(m, {0.2, 0.6}).cell_index == 1);
}

TEST_CASE("point on the diagonal resolves to the smallest cell index") {
  const Mesh m = build_structured(1, 1);
  CHECK(locate_point(m, {0.5, 0.5}).cell_index == 0);
}

TEST_CASE("point outside the domain throws") {
  const Mesh m = build_structured(1, 1);
  CHECK_THROWS_AS(locate_point(m, {2.0, 2.0}), OutOfDomainError);
  CHECK_THROWS_AS(locate_point(m, {0.5, -0.1}), OutOfDomainError);
}

TEST_CASE("locating cell barycenters returns the owning cell") {
  const Mesh m = build_structured(3, 2, {-1, 0, 2, 1});
  for (int c = 0; c < m.num_cells(); ++c) {
    const PointLocation loc = locate_point(m, m.cell_centroid(c));
    CHECK(loc.cell_index == c);
    for (int i = 0; i < 3; ++i)
      CHECK(loc.barycentric[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("refinement preserves the boundary") {
  const Mesh parent = build_structured(2, 2, {0, 0, 2, 1});
  const Mesh child = refine_uniform(parent);
  check_invariants(child);
  for (int v = 0; v < child.num_vertices(); ++v) {
    if (!child.vertex_on_boundary[v]) continue;
    const Vec2& p = child.vertices[v];
    const bool on_rect = p.x() == 0.0 || p.x() == 2.0 || p.y() == 0.0 || p.y() == 1.0;
    CHECK(on_rect);
  }
}

TEST_CASE("vtk export writes a parseable legacy file") {
  const Mesh m = build_structured(2, 2);
  const std::string path = "test_mesh_out.vtk";
  std::vector<Vec2> field(m.num_vertices(), Vec2(1.0, -2.0));
  std::vector<double> scalar(m.num_vertices(), 0.25);
  write_vtk(m, path, {{"v", field}}, {{"s", scalar}});
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# vtk DataFile", 0) == 0);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(all.find("POINTS 9") != std::string::npos);
  CHECK(all.find("CELLS 8") != std::string::npos);
  CHECK(all.find("VECTORS v") != std::string::npos);
  CHECK(all.find("SCALARS s") != std::string::npos);
  std::remove(path.c_str());
}
