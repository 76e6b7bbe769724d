#include <doctest.h>

#include <cmath>

#include "diffspace/diff_space.hpp"
#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"

using namespace diffspace;

TEST_CASE("samplers only emit members") {
  for (const SpacePtr& s : {fixtures::plane(), fixtures::bump_variety(), fixtures::disk_with_axis(),
                            fixtures::circle(), fixtures::unit_interval(), fixtures::z2_cone().space}) {
    CAPTURE(s->name());
    const auto pts = s->sample(3, 500);
    CHECK(pts.size() == 500);
    for (const auto& p : pts) REQUIRE(s->contains(p));
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const SpacePtr s = fixtures::bump_variety();
  CHECK(s->sample(11, 50) == s->sample(11, 50));
  CHECK(s->sample(11, 50) != s->sample(12, 50));
}

TEST_CASE("stratified samplers include the singular point") {
  for (const SpacePtr& s : {fixtures::bump_variety(), fixtures::disk_with_axis(), fixtures::z2_cone().space}) {
    CAPTURE(s->name());
    const auto pts = s->sample(0, 20);
    bool origin = false;
    for (const auto& p : pts) {
      bool zero = true;
      for (double c : p) zero = zero && c == 0.0;
      origin = origin || zero;
    }
    CHECK(origin);
  }
}

TEST_CASE("membership of the bump variety") {
  const SpacePtr s = fixtures::bump_variety();
  CHECK(s->contains(std::vector<double>{0.0, 0.0}));
  CHECK(s->contains(std::vector<double>{1.0, std::exp(-1.0)}));
  CHECK(s->contains(std::vector<double>{-0.5, 0.0}));
  CHECK_FALSE(s->contains(std::vector<double>{1.0, 0.5}));
  CHECK(s->residual(std::vector<double>{1.0, std::exp(-1.0)}) < 1e-12);
}

TEST_CASE("disk with axis is a union of clauses") {
  const SpacePtr s = fixtures::disk_with_axis();
  CHECK(s->contains(std::vector<double>{0.0, 1.0}));
  CHECK(s->contains(std::vector<double>{2.5, 0.0}));
  CHECK(s->contains(std::vector<double>{0.0, 0.0}));
  CHECK_FALSE(s->contains(std::vector<double>{0.0, 2.5}));
  CHECK_FALSE(s->contains(std::vector<double>{2.0, 0.5}));
}

TEST_CASE("make_space rejects samplers that leave the space") {
  Membership m;
  m.clauses = {{{Constraint::Kind::kNonNegative, parse_map({"x1"}, 1)}}};
  SamplerSpec spec;
  spec.parametrizations = {parse_map({"x1"}, 1)};
  spec.ranges = {{{-1.0, 1.0}}};
  CHECK_THROWS_AS(make_space("half-line", 1, m, make_sampler(spec), {SmoothMap::coordinate(1, 0)}), MembershipError);
  CHECK_THROWS_AS(make_space("none", 1, m, make_sampler(spec), {}), ValidationError);
}

TEST_CASE("generated elements and extensional equality") {
  const SpacePtr s = fixtures::plane();
  // F(g₁, g₂) = g₁² + g₂² against the same function written differently.
  const StructureElement a = generated_element(s, parse_map({"x1^2 + x2^2"}, 2), {0, 1});
  const StructureElement b{parse_map({"(x1 + x2)^2 - 2*x1*x2"}, 2), s};
  const StructureElement c{parse_map({"x1^2 + x2^2 + 1e-6"}, 2), s};
  CHECK(equal_on_space(a, b, 5));
  CHECK_FALSE(equal_on_space(a, c, 5));
  const StructureElement sum = compose_elements(parse_map({"x1 + x2"}, 2), {a, unit_element(s)});
  CHECK(sum(std::vector<double>{1.0, 2.0}) == doctest::Approx(6.0));
}

TEST_CASE("restriction to the variety identifies functions") {
  // y² and h(x)·y agree on the bump variety but not on the plane.
  const SpacePtr s = fixtures::bump_variety();
  const StructureElement a{parse_map({"x2^2"}, 2), s};
  const StructureElement b{parse_map({"bump(x1)*x2"}, 2), s};
  CHECK(equal_on_space(a, b, 1));
  CHECK_FALSE(equal_on_space(StructureElement{a.representative, fixtures::plane()},
                             StructureElement{b.representative, fixtures::plane()}, 1));
}

TEST_CASE("product with the interval") {
  const SpacePtr ix = product_with_interval(fixtures::circle());
  CHECK(ix->ambient_dim() == 3);
  CHECK(ix->generators().size() == fixtures::circle()->generators().size() + 1);
  CHECK(ix->contains(std::vector<double>{0.5, 1.0, 0.0}));
  CHECK_FALSE(ix->contains(std::vector<double>{1.5, 1.0, 0.0}));
  for (const auto& p : ix->sample(2, 100)) REQUIRE(ix->contains(p));
}

TEST_CASE("sample components") {
  const std::vector<Point> pts{{0.0}, {0.05}, {0.1}, {1.0}, {1.05}};
  CHECK(sample_components(pts, 0.06) == 2);
  CHECK(sample_components(pts, 1.0) == 1);
}
