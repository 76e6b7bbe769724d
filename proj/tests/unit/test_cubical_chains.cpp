#include <doctest.h>

#include <random>

#include "diffspace/chains.hpp"
#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"

using namespace diffspace;

TEST_CASE("boundary of the unit square") {
  const SpacePtr plane = fixtures::plane();
  const SingularCube sq = identity_cube(plane, 2);
  const CubicalChain b = boundary(sq);
  CHECK(b.size() == 4);
  long total = 0;
  for (const auto& t : b.terms()) total += t.coefficient;
  CHECK(total == 0);
  // Axis 1 upper face s ↦ (1, s) carries +1, axis 2 upper face s ↦ (s, 1) carries −1.
  const SingularCube right = make_cube(Box::unit(1), parse_map({"1", "x1"}, 1), plane);
  const SingularCube top = make_cube(Box::unit(1), parse_map({"x1", "1"}, 1), plane);
  for (const auto& t : b.terms()) {
    if (same_cube(t.cube, right)) CHECK(t.coefficient == 1);
    if (same_cube(t.cube, top)) CHECK(t.coefficient == -1);
  }
}

TEST_CASE("boundary squared vanishes") {
  for (int p = 2; p <= 4; ++p) {
    const SpacePtr rp = euclidean_space(p, 1.0);
    CAPTURE(p);
    CHECK(boundary(boundary(identity_cube(rp, p))).empty());
  }
  std::mt19937_64 rng(3);
  const SpacePtr r3 = euclidean_space(3, 1.0);
  for (int k = 0; k < 10; ++k)
    for (int p = 2; p <= 3; ++p) CHECK(boundary(boundary(fixtures::random_affine_cube(r3, p, rng))).empty());
}

TEST_CASE("0-cubes have no boundary") {
  const SingularCube pt = make_cube(Box(), SmoothMap::constant(0, {0.5, 0.5}), fixtures::plane());
  CHECK(pt.dim() == 0);
  CHECK_THROWS_AS(boundary(pt), DimensionError);
  CHECK_THROWS_AS(face(identity_cube(fixtures::plane(), 2), 3, true), DimensionError);
}

TEST_CASE("faces restrict the representative") {
  const SpacePtr plane = fixtures::plane();
  const SingularCube c = make_cube(Box({{0.0, 2.0}, {-1.0, 1.0}}), parse_map({"x1*x2", "x1 + x2"}, 2), plane);
  const SingularCube f = face(c, 1, true);
  CHECK(f.dim() == 1);
  CHECK(f.box == Box({{-1.0, 1.0}}));
  const Point v = f(std::vector<double>{0.5});
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(2.5));
}

TEST_CASE("chains cancel extensionally equal cubes") {
  const SpacePtr plane = fixtures::plane();
  const SingularCube a = make_cube(Box::unit(1), parse_map({"x1^2", "x1"}, 1), plane);
  const SingularCube b = make_cube(Box::unit(1), parse_map({"x1*x1", "(x1 + 1) - 1"}, 1), plane);
  CHECK((CubicalChain(a) - CubicalChain(b)).empty());
  CubicalChain c(a, 2);
  c.add(3, b);
  REQUIRE(c.size() == 1);
  CHECK(c.terms()[0].coefficient == 5);
  const SingularCube other = make_cube(Box({{0.0, 0.5}}), parse_map({"x1^2", "x1"}, 1), plane);
  CHECK((CubicalChain(a) - CubicalChain(other)).size() == 2);
}

TEST_CASE("cubes must land in their space") {
  CHECK_THROWS_AS(make_cube(Box::unit(1), parse_map({"x1", "1"}, 1), fixtures::circle()), MembershipError);
  CHECK_THROWS_AS(make_cube(Box::unit(2), parse_map({"x1"}, 1), fixtures::plane()), DimensionError);
  CHECK_THROWS_AS(Box({{1.0, 0.0}}), DimensionError);
}

TEST_CASE("prism and endpoint inclusions") {
  const SpacePtr plane = fixtures::plane();
  const SingularCube c = make_cube(Box::unit(1), parse_map({"x1", "x1^2"}, 1), plane);
  const SingularCube k = prism(c);
  CHECK(k.dim() == 2);
  CHECK(k.space->ambient_dim() == 3);
  const Point v = k(std::vector<double>{0.25, 0.5});
  CHECK(v == Point{0.25, 0.5, 0.25});
  const Point u = endpoint_inclusion(1, c)(std::vector<double>{0.5});
  CHECK(u == Point{1.0, 0.5, 0.25});
  CHECK_THROWS_AS(endpoint_inclusion(2, c), DimensionError);
}

TEST_CASE("chain homotopy identity") {
  const SpacePtr plane = fixtures::plane();
  std::mt19937_64 rng(5);
  for (int p = 1; p <= 2; ++p)
    for (int k = 0; k < 5; ++k) {
      const HomotopyCheck h = chain_homotopy_check(fixtures::random_affine_cube(plane, p, rng));
      CHECK(h.holds);
      CHECK(h.lhs.size() == h.rhs.size());
    }
  const HomotopyCheck h0 = chain_homotopy_check(make_cube(Box(), SmoothMap::constant(0, {0.2, -0.4}), plane));
  CHECK(h0.holds);
  CHECK(h0.rhs.size() == 2);
}
