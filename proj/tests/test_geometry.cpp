#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "perifem/geometry.hpp"

using namespace perifem;

// ============================================================================
// Box queries
// ============================================================================

TEST(Geometry, BoxBasics) {
  Box box{2, {0.0, -1.0}, {2.0, 1.0}};
  EXPECT_DOUBLE_EQ(box.extent(0), 2.0);
  EXPECT_DOUBLE_EQ(box.extent(1), 2.0);
  EXPECT_DOUBLE_EQ(box.min_extent(), 2.0);
  EXPECT_TRUE(box.contains({1.0, 0.0}));
  EXPECT_TRUE(box.contains({0.0, -1.0}));
  EXPECT_FALSE(box.contains({2.1, 0.0}));
  EXPECT_TRUE(box.contains({2.05, 0.0}, 0.1));
}

TEST(Geometry, BoundaryDistance) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  EXPECT_DOUBLE_EQ(box.boundary_distance({0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(box.boundary_distance({0.2, 0.5}), 0.2);
  EXPECT_DOUBLE_EQ(box.boundary_distance({0.5, 0.9}), 0.1);
  EXPECT_DOUBLE_EQ(box.boundary_distance({0.0, 0.5}), 0.0);
  EXPECT_LT(box.boundary_distance({-0.1, 0.5}), 0.0);

  Box line{1, {2.0, 0.0}, {3.0, 0.0}};
  EXPECT_DOUBLE_EQ(line.boundary_distance({2.25, 0.0}), 0.25);
}

TEST(Geometry, Smoothstep) {
  EXPECT_DOUBLE_EQ(smoothstep(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep(0.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep(0.5), 0.5);
  EXPECT_DOUBLE_EQ(smoothstep(1.0), 1.0);
  EXPECT_DOUBLE_EQ(smoothstep(2.0), 1.0);
  EXPECT_NEAR(smoothstep(0.25), 3 * 0.0625 - 2 * 0.015625, 1e-15);
}

TEST(Geometry, TaperOmega) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  const double eps = 0.1;
  EXPECT_DOUBLE_EQ(taper_omega(box, {0.0, 0.0}, eps), 0.0);
  EXPECT_DOUBLE_EQ(taper_omega(box, {-0.5, 0.0}, eps), 0.0);
  EXPECT_DOUBLE_EQ(taper_omega(box, {0.5, 0.0}, eps), 1.0);
  EXPECT_DOUBLE_EQ(taper_omega(box, {0.1, 0.0}, eps), 1.0);
  EXPECT_DOUBLE_EQ(taper_omega(box, {0.05, 0.0}, eps), smoothstep(0.5));
  EXPECT_GT(taper_omega(box, {0.02, 0.0}, eps), 0.0);
  EXPECT_LT(taper_omega(box, {0.02, 0.0}, eps), taper_omega(box, {0.04, 0.0}, eps));
}

// ============================================================================
// Uniform meshes
// ============================================================================

TEST(Geometry, UniformMesh1d) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  Mesh mesh = build_uniform_mesh(box, 0.1);
  EXPECT_EQ(mesh.d, 1);
  EXPECT_EQ(mesh.n_nodes(), 11);
  EXPECT_EQ(mesh.n_elems(), 10);
  EXPECT_LE(mesh.h, 0.1 + 1e-15);
  EXPECT_EQ(mesh.n_interior(), 9);
  EXPECT_TRUE(mesh.on_boundary.front());
  EXPECT_TRUE(mesh.on_boundary.back());
  double vol = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) vol += element_volume(mesh, e);
  EXPECT_NEAR(vol, 1.0, 1e-14);
}

TEST(Geometry, UniformMesh1dNonIntegerDivision) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / 51);
  EXPECT_EQ(mesh.n_nodes(), 52);
  EXPECT_EQ(mesh.n_interior(), 50);
}

TEST(Geometry, UniformMesh2d) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  Mesh mesh = build_uniform_mesh(box, 0.2);
  EXPECT_EQ(mesh.d, 2);
  EXPECT_LE(mesh.h, 0.2 + 1e-15);
  EXPECT_EQ(mesh.n_elems(), 2 * mesh.nx * mesh.ny);
  double vol = 0.0;
  double dia = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    vol += element_volume(mesh, e);
    dia = std::max(dia, element_diameter(mesh, e));
  }
  EXPECT_NEAR(vol, 1.0, 1e-12);
  EXPECT_NEAR(dia, mesh.h, 1e-12);
  int nb = 0;
  for (auto b : mesh.on_boundary) nb += b ? 1 : 0;
  EXPECT_EQ(nb, 2 * (mesh.nx + 1) + 2 * (mesh.ny + 1) - 4);
}

// ============================================================================
// Point location
// ============================================================================

TEST(Geometry, Locate1d) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  Mesh mesh = build_uniform_mesh(box, 0.25);
  double bary[3];
  const int e = locate(mesh, {0.3, 0.0}, bary);
  ASSERT_GE(e, 0);
  Point x{0.0, 0.0};
  for (int i = 0; i < 2; ++i) x = x + bary[i] * mesh.nodes[mesh.elems[e][i]];
  EXPECT_NEAR(x[0], 0.3, 1e-14);
  EXPECT_NEAR(bary[0] + bary[1], 1.0, 1e-14);
  EXPECT_EQ(locate(mesh, {1.2, 0.0}, bary), -1);
  EXPECT_EQ(locate(mesh, {-0.2, 0.0}, bary), -1);
}

TEST(Geometry, Locate2dReconstructsPoint) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  Mesh mesh = build_uniform_mesh(box, 0.3);
  double bary[3];
  for (Point x : {Point{0.17, 0.52}, Point{0.9, 0.1}, Point{0.0, 0.0},
                  Point{1.0, 1.0}, Point{0.5, 0.999}}) {
    const int e = locate(mesh, x, bary);
    ASSERT_GE(e, 0) << "x = (" << x[0] << ", " << x[1] << ")";
    Point y{0.0, 0.0};
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      y = y + bary[i] * mesh.nodes[mesh.elems[e][i]];
      s += bary[i];
      EXPECT_GE(bary[i], -1e-12);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NEAR(y[0], x[0], 1e-12);
    EXPECT_NEAR(y[1], x[1], 1e-12);
  }
  EXPECT_EQ(locate(mesh, {1.5, 0.5}, bary), -1);
}

// ============================================================================
// Text exchange format
// ============================================================================

TEST(Geometry, MeshRoundTrip) {
  Box box{2, {0.0, 0.0}, {1.0, 0.5}};
  Mesh mesh = build_uniform_mesh(box, 0.21);
  std::stringstream ss;
  write_mesh_text(mesh, ss);
  Mesh back = read_mesh_text(ss);
  ASSERT_EQ(back.d, mesh.d);
  ASSERT_EQ(back.n_nodes(), mesh.n_nodes());
  ASSERT_EQ(back.n_elems(), mesh.n_elems());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    EXPECT_DOUBLE_EQ(back.nodes[i][0], mesh.nodes[i][0]);
    EXPECT_DOUBLE_EQ(back.nodes[i][1], mesh.nodes[i][1]);
    EXPECT_EQ(back.on_boundary[i], mesh.on_boundary[i]);
  }
  for (int e = 0; e < mesh.n_elems(); ++e) EXPECT_EQ(back.elems[e], mesh.elems[e]);
  // Location still works without the structured-grid acceleration.
  EXPECT_EQ(back.nx, 0);
  double bary[3];
  EXPECT_GE(locate(back, {0.4, 0.3}, bary), 0);
}
