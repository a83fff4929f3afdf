#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cav/degree.hpp"
#include "cav/mapfamily.hpp"

using namespace cav;

TEST_CASE("icosphere combinatorics") {
  TriangulatedSphere s0 = icosphere(CartesianPoint::Zero(), 1.0, 0);
  CHECK(s0.triangles.size() == 20);
  CHECK(s0.vertices.size() == 12);
  TriangulatedSphere s3 = icosphere(CartesianPoint::Zero(), 1.0, 3);
  CHECK(s3.triangles.size() == 1280);
  CHECK(is_closed_oriented(s3.vertices, s3.triangles));
  CHECK_THROWS_AS(icosphere(CartesianPoint::Zero(), 1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(icosphere(CartesianPoint::Zero(), 1.0, 9), std::invalid_argument);

  // All vertices on the sphere, oriented area closes up.
  for (const CartesianPoint& v : s3.vertices)
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  ImageSurface id = push_mesh([](const CartesianPoint& y) { return y; }, s3);
  CartesianPoint total = CartesianPoint::Zero();
  for (const CartesianPoint& a : id.area_vectors) total += a;
  CHECK(total.norm() < 1e-10);
}

TEST_CASE("push_mesh basics") {
  TriangulatedSphere mesh = icosphere(CartesianPoint::Zero(), 1.0, 2);
  ImageSurface id = push_mesh([](const CartesianPoint& y) { return y; }, mesh);
  for (size_t i = 0; i < mesh.vertices.size(); ++i)
    CHECK((id.vertices[i] - mesh.vertices[i]).norm() == 0.0);

  ImageSurface rf = push_mesh(reflect_z, mesh);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(rf.vertices[i].x() == mesh.vertices[i].x());
    CHECK(rf.vertices[i].z() == -mesh.vertices[i].z());
  }

  // The weak limit squeezes S(0, 0.5) into the closed ball of radius 0.5.
  LimitMap lim(7.0 / 12.0);
  TriangulatedSphere half = icosphere(CartesianPoint::Zero(), 0.5, 3);
  ImageSurface img = push_mesh([&](const CartesianPoint& y) { return lim.map(y); }, half);
  for (const CartesianPoint& v : img.vertices) CHECK(v.norm() <= 0.5 + 1e-12);
}

TEST_CASE("degree oracles") {
  TriangulatedSphere mesh = icosphere(CartesianPoint::Zero(), 1.0, 4);
  ImageSurface id = push_mesh([](const CartesianPoint& y) { return y; }, mesh);
  DegreeResult at_origin = degree_at(id, CartesianPoint::Zero());
  CHECK(at_origin.degree == 1);
  CHECK(at_origin.guard_ok);
  CHECK(at_origin.residue_ok);
  DegreeResult outside = degree_at(id, CartesianPoint(2, 0, 0));
  CHECK(outside.degree == 0);
  CHECK(outside.residue_ok);

  ImageSurface rf = push_mesh(reflect_z, mesh);
  DegreeResult flipped = degree_at(rf, CartesianPoint::Zero());
  CHECK(flipped.degree == -1);
  CHECK(flipped.guard_ok);

  CHECK(in_topological_image(id, CartesianPoint::Zero()));
  CHECK_FALSE(in_topological_image(id, CartesianPoint(2, 0, 0)));
}

TEST_CASE("degree is stable under mesh refinement") {
  FamilyMap f(make_params(0.1, 1.0));
  CartesianPoint y = f.map(to_cartesian(SphericalPoint::canonical(1.0, 2.0, 0.5)));
  int prev = 0;
  for (int level = 4; level <= 6; ++level) {
    TriangulatedSphere mesh = icosphere(CartesianPoint::Zero(), 1.5, level);
    ImageSurface img = push_mesh([&](const CartesianPoint& x) { return f.map(x); }, mesh);
    DegreeResult d = degree_at(img, y);
    CHECK(d.residue_ok);
    if (level > 4) CHECK(d.degree == prev);
    prev = d.degree;
  }
  CHECK(prev == 1);
}

TEST_CASE("limit map wraps material from outside: degree -1 inside the drop") {
  LimitMap lim(7.0 / 12.0);
  // The image of r = 0.75 sits only ~0.053 from the drop surface, so the
  // 10x-diameter guard needs the level-7 mesh (margin ~12.8) to certify it.
  TriangulatedSphere mesh = icosphere(CartesianPoint::Zero(), 0.5, 7);
  ImageSurface img = push_mesh([&](const CartesianPoint& y) { return lim.map(y); }, mesh);
  CartesianPoint y = lim.map(to_cartesian(SphericalPoint::canonical(0.75, M_PI / 2, 0.0)));
  DegreeResult d = degree_at(img, y);
  CHECK(d.degree == -1);
  CHECK(d.guard_ok);
  CHECK(d.residue_ok);
  CHECK(in_topological_image(img, y));
}

TEST_CASE("weak degree identity for the identity and reflected sphere") {
  TriangulatedSphere mesh = icosphere(CartesianPoint::Zero(), 1.0, 5);
  VectorField u = linear_field();

  ImageSurface id = push_mesh([](const CartesianPoint& y) { return y; }, mesh);
  WeakIdentityReport rep = verify_weak_identity(id, u, 128);
  CHECK(rep.lhs == doctest::Approx(4.0 * M_PI / 3.0).epsilon(2e-3));
  CHECK(rep.rhs == doctest::Approx(4.0 * M_PI / 3.0).epsilon(2e-3));
  CHECK(rep.residual < 1e-3);
  CHECK(rep.residue_fraction_ok);

  ImageSurface rf = push_mesh(reflect_z, mesh);
  WeakIdentityReport rep2 = verify_weak_identity(rf, u, 128);
  CHECK(rep2.lhs == doctest::Approx(-4.0 * M_PI / 3.0).epsilon(2e-3));
  CHECK(rep2.rhs == doctest::Approx(-4.0 * M_PI / 3.0).epsilon(2e-3));
  CHECK(rep2.residual < 1e-3);
}
