#include <doctest.h>

#include "diffspace/cech.hpp"
#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"
#include "diffspace/suites.hpp"

using namespace diffspace;

namespace {

RationalMatrixDense matrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries) {
  return {rows, cols, std::move(entries)};
}

}  // namespace

TEST_CASE("exact rank") {
  CHECK(exact_rank(matrix(2, 2, {1, 2, 2, 4})) == 1);
  CHECK(exact_rank(matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})) == 3);
  CHECK(exact_rank(matrix(2, 3, {Rational(1, 3), Rational(1, 7), 1, Rational(2, 3), Rational(2, 7), 2})) == 1);
  CHECK(exact_rank(matrix(0, 0, {})) == 0);
  // Nearly dependent rows stay independent in exact arithmetic.
  CHECK(exact_rank(matrix(2, 2, {1, 1, 1, Rational(1000000001, 1000000000)})) == 2);
  CHECK(is_zero(multiply(matrix(1, 2, {1, -1}), matrix(2, 1, {1, 1}))));
}

TEST_CASE("bundled covers have the expected cohomology") {
  for (const auto& e : bundled_cover_experiments()) {
    CAPTURE(e.id);
    const CoverOutcome o = run_cover_experiment(e, 0);
    CHECK(o.delta_squared_zero);
    REQUIRE(e.expected);
    CHECK(o.dims == *e.expected);
    CHECK(o.validation.uncovered == 0);
  }
}

TEST_CASE("Euler characteristic of the nerve") {
  // Σ(−1)^q dim H^q = Σ(−1)^q #q-simplices once every simplex is counted.
  for (const auto& [cover, degree] : std::vector<std::pair<Cover, int>>{
           {fixtures::circle_cover(3), 2}, {fixtures::circle_cover(4), 2}, {fixtures::interval_cover(3), 2},
           {fixtures::plane_cover(true), 3}}) {
    const CechComplex cx = build_complex(cover, degree);
    const auto dims = cohomology_dims(cx);
    long chi_h = 0, chi_c = 0;
    for (std::size_t q = 0; q < dims.size(); ++q) {
      chi_h += (q % 2 ? -1 : 1) * dims[q];
      chi_c += (q % 2 ? -1 : 1) * static_cast<long>(cx.basis[q].size());
    }
    CHECK(chi_h == chi_c);
    CHECK(coboundary_squares_to_zero(cx));
  }
}

TEST_CASE("circle covers detect the loop") {
  CHECK(cohomology_dims(build_complex(fixtures::circle_cover(3), 1)) == std::vector<int>{1, 1});
  CHECK(cohomology_dims(build_complex(fixtures::circle_cover(4), 2)) == std::vector<int>{1, 1, 0});
}

TEST_CASE("cover validation rejects a wrong nerve") {
  Cover c = fixtures::circle_cover(3);
  const auto declared = c.nonempty;
  c.nonempty.clear();
  CHECK_THROWS_AS(validate_cover(c, 0), ValidationError);

  c.nonempty = declared;
  c.nonempty.push_back({0, 1, 2});
  CHECK_THROWS_AS(validate_cover(c, 0), ValidationError);

  Cover partial = fixtures::circle_cover(3);
  partial.regions.pop_back();
  partial.nonempty = {{0, 1}};
  CHECK_THROWS_AS(validate_cover(partial, 0), ValidationError);
}

TEST_CASE("nerve must be closed under faces") {
  Cover c = fixtures::circle_cover(3);
  c.nonempty = {{0, 1, 2}};
  CHECK_THROWS_AS(build_complex(c, 2), ValidationError);
}

TEST_CASE("de Rham spot checks are consistent") {
  for (const auto& name : fixtures::derham_fixture_names()) {
    CAPTURE(name);
    const DeRhamReport r = de_rham_spotcheck(fixtures::derham_fixture(name, 0));
    CHECK(r.consistent);
    if (name == "circle") {
      REQUIRE(r.period);
      CHECK(*r.period == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
    } else {
      CHECK(r.exact_checked > 0);
      CHECK(r.max_exactness_residual < 1e-7);
    }
  }
}
