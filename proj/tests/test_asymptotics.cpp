#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "hardytree/asymptotics.hpp"
#include "hardytree/hardy_operator.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("the interval constant at the anchor exponents") {
  AlphaP a2 = alpha_p(PNorm::of(2.0));
  CHECK(a2.analytic);
  CHECK(a2.value == doctest::Approx(1.0 / ts::kPi).epsilon(1e-12));
  CHECK(alpha_p(PNorm::of(1.0)).value == doctest::Approx(0.5));
  CHECK(alpha_p(PNorm::of(kInf)).value == doctest::Approx(0.5));
  CHECK(alpha_p(PNorm::of(1.0)).analytic);

  AlphaP a15 = alpha_p(PNorm::of(1.5));
  CHECK_FALSE(a15.analytic);
  CHECK(a15.value == doctest::Approx(0.328192515).epsilon(1e-4));
  CHECK(a15.error < 1e-4);
  CHECK(a15.value < 0.5);
  CHECK(a15.value > 1.0 / ts::kPi);
}

TEST_CASE("the closed-form lower bound never exceeds the norm") {
  ts::Rooted iv = ts::rooted("interval");
  CHECK(norm_lower_bound(iv.rt, iv.u, iv.v, PNorm::of(2.0)) == doctest::Approx(0.5));
  CHECK(norm_lower_bound(iv.rt, iv.u, iv.v, PNorm::of(1.0)) == doctest::Approx(0.9921875));
  CHECK(norm_lower_bound(iv.rt, iv.u, iv.v, PNorm::of(kInf)) == doctest::Approx(0.9921875));

  for (const char* name : {"interval", "y_sym"}) {
    ts::Rooted r = ts::rooted(name);
    Subtree whole = whole_tree(r.rt);
    double lb = norm_lower_bound(r.rt, r.u, r.v, PNorm::of(2.0));
    double norm = op_norm_rich(r.rt, r.u, r.v, whole, PNorm::of(2.0), ts::grid(96));
    CHECK(lb <= norm * (1.0 + 1e-9));
  }
}

TEST_CASE("path dual norm and level crossings in closed form") {
  ts::Rooted iv = ts::rooted("interval");
  CHECK(path_dual_norm(iv.rt, iv.u, PNorm::of(2.0), Location{0, 0.7}) ==
        doctest::Approx(std::sqrt(0.7)).epsilon(1e-12));

  auto one = u_level_crossings(iv.rt, iv.u, PNorm::of(2.0), 0.25);
  REQUIRE(one.size() == 1);
  CHECK(one[0].edge == 0);
  CHECK(iv.rt.down(one[0]) == doctest::Approx(0.25));
  CHECK(u_level_crossings(iv.rt, iv.u, PNorm::of(2.0), 2.0).empty());

  ts::Rooted y = ts::rooted("y_sym");
  auto two = u_level_crossings(y.rt, y.u, PNorm::of(2.0), 1.5);
  REQUIRE(two.size() == 2);
  CHECK(y.rt.down(two[0]) == doctest::Approx(0.5));
  CHECK(y.rt.down(two[1]) == doctest::Approx(0.5));
  CHECK(two[0].edge != two[1].edge);
}

TEST_CASE("meet point of two branch leaves is the junction") {
  ts::Rooted y = ts::rooted("y_sym");
  Location mp = meet_point(y.rt, y.rt.vertex_location(2), y.rt.vertex_location(3));
  CHECK(y.rt.same_point(mp, y.rt.vertex_location(1)));
  Location self = meet_point(y.rt, y.rt.at_down(1, 0.3), y.rt.at_down(1, 0.7));
  CHECK(y.rt.same_point(self, y.rt.at_down(1, 0.3)));
}

TEST_CASE("minimal constrained mass on a two-leg star") {
  MetricTree star(3, {Edge{0, 1, 1.0}, Edge{0, 2, 1.0}});
  RootedTree rt = RootedTree::root_at(star, Location{0, 0.0});
  StepWeight u = StepWeight::constant(star, 1.0);
  std::vector<Location> tips{rt.vertex_location(1), rt.vertex_location(2)};
  CHECK(alpha_K(rt, u, PNorm::of(2.0), tips) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  CHECK(alpha_K(rt, u, PNorm::of(1.5), tips) ==
        doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-3));

  // single constraint is a Hoelder identity; scaling u rescales inversely
  std::vector<Location> one_tip{rt.vertex_location(1)};
  CHECK(alpha_K(rt, u, PNorm::of(2.0), one_tip) == doctest::Approx(1.0).epsilon(1e-9));
  StepWeight u3 = StepWeight::constant(star, 3.0);
  CHECK(alpha_K(rt, u3, PNorm::of(2.0), one_tip) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  StepWeight zero = StepWeight::constant(star, 0.0);
  CHECK_THROWS_AS(alpha_K(rt, zero, PNorm::of(2.0), one_tip), infeasible_constraint);
}

TEST_CASE("level-set scan brackets the norm within the factor-four window") {
  ts::Rooted iv = ts::rooted("interval");
  BoundednessReport rep = boundedness_check(iv.rt, iv.u, iv.v, PNorm::of(2.0), 64, ts::grid(128));
  CHECK(rep.lower_ok);
  CHECK(rep.a_hat == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.op_norm == doctest::Approx(2.0 / ts::kPi).epsilon(1e-6));
  CHECK(rep.ratio == doctest::Approx(4.0 / ts::kPi).epsilon(1e-6));
  CHECK(rep.rows.size() == 65);
  for (const BoundednessRow& row : rep.rows) CHECK(row.value <= rep.a_hat * (1.0 + 1e-12));

  ts::Rooted y = ts::rooted("y_sym");
  BoundednessReport yr = boundedness_check(y.rt, y.u, y.v, PNorm::of(2.0), 64, ts::grid(96, 128));
  CHECK(yr.lower_ok);
  CHECK(yr.ratio >= 1.0 - 1e-9);
  CHECK(yr.ratio <= 4.0 * (1.0 + 1e-9));
}

TEST_CASE("endpoint-exponent comparisons on stepped intervals") {
  MetricTree t(2, {Edge{0, 1, 1.0}});
  RootedTree rt = RootedTree::root_at(t, Location{0, 0.0});
  StepWeight flat = StepWeight::constant(t, 1.0);
  StepWeight stepped = flat;
  stepped.per_edge[0] = {WeightSegment{0.3, 0.5}, WeightSegment{0.7, 1.5}};

  IntervalBoundsReport pinf = p1_inf_bounds(rt, flat, stepped, true);
  CHECK(pinf.all_pass);
  CHECK(pinf.target > 0.0);
  CHECK_FALSE(pinf.rows.empty());

  IntervalBoundsReport pone = p1_inf_bounds(rt, stepped, flat, false);
  CHECK(pone.all_pass);
  CHECK(pone.target > 0.0);

  ts::Rooted y = ts::rooted("y_sym");
  CHECK_THROWS_AS(p1_inf_bounds(y.rt, y.u, y.v, true), std::domain_error);
}

TEST_CASE("branching caps for regular trees") {
  CHECK(regular_tree_b_bound(2, 7.0 / 3.0) == doctest::Approx(4.0));
  CHECK(regular_tree_b_bound(3, 2.0) == doctest::Approx(9.0));
  CHECK(regular_tree_b_bound(2, 4.0) == doctest::Approx(4.0));
}
