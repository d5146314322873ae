#include <cmath>
#include <limits>

#include "doctest.h"
#include "hardytree/weights.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Interval carrying a two-step u: 1 on the top half, 3 on the bottom half.
ts::Rooted stepped_interval() {
  ts::Rooted r = ts::rooted("interval");
  r.u.per_edge[0] = {WeightSegment{0.5, 1.0}, WeightSegment{0.5, 3.0}};
  return r;
}

}  // namespace

TEST_CASE("exponent bookkeeping") {
  CHECK(PNorm::of(2.0).conjugate() == doctest::Approx(2.0));
  CHECK(PNorm::of(1.5).conjugate() == doctest::Approx(3.0));
  CHECK(PNorm::of(1.0).is_one());
  CHECK(std::isinf(PNorm::of(1.0).conjugate()));
  CHECK(PNorm::of(kInf).is_inf());
  CHECK(PNorm::of(kInf).conjugate() == doctest::Approx(1.0));
  CHECK_THROWS_AS(PNorm::of(0.5), unsupported_exponent);
  CHECK_THROWS_AS(PNorm::of(-2.0), unsupported_exponent);
}

TEST_CASE("weight validation rejects mismatched segment lists") {
  Fixture iv = fixture_interval();
  StepWeight w = StepWeight::constant(iv.tree, 1.0);
  CHECK_NOTHROW(w.validate(iv.tree));

  StepWeight short_list = w;
  short_list.per_edge[0] = {WeightSegment{0.5, 1.0}};
  CHECK_THROWS_AS(short_list.validate(iv.tree), invalid_weight);

  StepWeight negative = w;
  negative.per_edge[0] = {WeightSegment{1.0, -0.25}};
  CHECK_THROWS_AS(negative.validate(iv.tree), invalid_weight);
}

TEST_CASE("value lookup and rooted segment order") {
  ts::Rooted r = stepped_interval();
  CHECK(value_at(r.u, 0, 0.25) == doctest::Approx(1.0));
  CHECK(value_at(r.u, 0, 0.75) == doctest::Approx(3.0));
  auto segs = down_segments(r.rt, r.u, 0);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].value == doctest::Approx(1.0));  // top of the rooted edge first
  CHECK(segs[1].value == doctest::Approx(3.0));
}

TEST_CASE("lp norms in closed form") {
  ts::Rooted r = stepped_interval();
  Subtree whole = whole_tree(r.rt);
  CHECK(lp_norm(r.rt, r.v, PNorm::of(2.0), whole) == doctest::Approx(1.0));
  CHECK(lp_norm(r.rt, r.u, PNorm::of(2.0), whole) == doctest::Approx(std::sqrt(5.0)));
  CHECK(lp_norm(r.rt, r.u, PNorm::of(1.0), whole) == doctest::Approx(2.0));
  CHECK(lp_norm(r.rt, r.u, PNorm::of(kInf), whole) == doctest::Approx(3.0));

  // homogeneity
  StepWeight scaled = r.u;
  for (auto& e : scaled.per_edge)
    for (auto& s : e) s.value *= 1.7;
  CHECK(lp_norm(r.rt, scaled, PNorm::of(2.0), whole) ==
        doctest::Approx(1.7 * std::sqrt(5.0)));

  // restriction to the top half sees only the first step
  Subtree top = whole;
  top.cuts.push_back(Location{0, 0.5});
  CHECK(lp_norm(r.rt, r.u, PNorm::of(kInf), top) == doctest::Approx(1.0));
  CHECK(lp_norm(r.rt, r.u, PNorm::of(2.0), top) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("mass and product integrals match the bundled closed forms") {
  for (const Fixture& fx : all_fixtures()) {
    ts::Rooted r = ts::rooted(fx);
    Subtree whole = whole_tree(r.rt);
    CHECK(product_integral(r.rt, r.u, r.v, whole) == doctest::Approx(fx.uv_integral));
  }
  ts::Rooted y = ts::rooted("y_sym");
  Subtree whole = whole_tree(y.rt);
  CHECK(mu(y.rt, y.v, PNorm::of(2.0), whole) == doctest::Approx(3.0));
  CHECK(mu(y.rt, y.v, PNorm::of(kInf), whole) == doctest::Approx(3.0));
}

TEST_CASE("path primitive of the dual power") {
  ts::Rooted r = ts::rooted("interval");
  CHECK(primitive_U(r.rt, r.u, PNorm::of(2.0), Location{0, 0.7}) == doctest::Approx(0.7));
  CHECK_THROWS_AS(primitive_U(r.rt, r.u, PNorm::of(1.0), Location{0, 0.7}),
                  unsupported_exponent);
}

TEST_CASE("rearrangement helpers") {
  std::vector<WeightSegment> segs{{0.5, 1.0}, {0.5, 3.0}};
  auto sorted = rearrange_desc(segs);
  REQUIRE(sorted.size() == 2);
  CHECK(sorted[0].value == doctest::Approx(3.0));
  CHECK(sorted[1].value == doctest::Approx(1.0));
  CHECK(rearrangement_sup_t(segs) == doctest::Approx(1.5));
}

TEST_CASE("local essential sup takes the largest adjacent germ") {
  ts::Rooted r = stepped_interval();
  CHECK(local_ess_sup(r.rt, r.u, Location{0, 0.5}) == doctest::Approx(3.0));
  CHECK(local_ess_sup(r.rt, r.u, Location{0, 0.25}) == doctest::Approx(1.0));
  ts::Rooted y = ts::rooted("y_sym");
  CHECK(local_ess_sup(y.rt, y.u, y.rt.vertex_location(1)) == doctest::Approx(1.0));
}

TEST_CASE("splitting a weight preserves mass and values") {
  Fixture iv = fixture_interval();
  StepWeight stepped = iv.u;
  stepped.per_edge[0] = {WeightSegment{0.5, 1.0}, WeightSegment{0.5, 3.0}};

  RootedTree rt = RootedTree::root_at(iv.tree, Location{0, 0.25});
  StepWeight su = split_weight(stepped, rt.split());
  CHECK_NOTHROW(su.validate(rt.tree()));
  Subtree whole = whole_tree(rt);
  CHECK(lp_norm(rt, su, PNorm::of(1.0), whole) == doctest::Approx(2.0));
  CHECK(lp_norm(rt, su, PNorm::of(2.0), whole) == doctest::Approx(std::sqrt(5.0)));
  // the untouched breakpoint survives on the lower half
  EdgeId lower = rt.split().new_edge;
  EdgeId upper = rt.split().original_edge;
  double lower_len = rt.tree().edge(lower).length + rt.tree().edge(upper).length;
  CHECK(lower_len == doctest::Approx(1.0));
}
