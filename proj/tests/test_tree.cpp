#include <cmath>
#include <vector>

#include "doctest.h"
#include "hardytree/tree.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

TEST_CASE("tree construction rejects malformed graphs") {
  CHECK_THROWS_AS(MetricTree(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}, Edge{2, 0, 1.0}}).validate(),
                  invalid_tree);
  CHECK_THROWS_AS(MetricTree(4, {Edge{0, 1, 1.0}, Edge{2, 3, 1.0}}).validate(), invalid_tree);
  CHECK_THROWS_AS(MetricTree(2, {Edge{0, 1, 0.0}}).validate(), invalid_tree);
  CHECK_THROWS_AS(MetricTree(2, {Edge{0, 5, 1.0}}).validate(), invalid_tree);
  CHECK_NOTHROW(fixture_y_sym().tree.validate());
}

TEST_CASE("rooting at a vertex orients every edge away from it") {
  ts::Rooted y = ts::rooted("y_sym");
  CHECK(y.rt.root() == 0);
  CHECK_FALSE(y.rt.split().did_split);
  CHECK(y.rt.parent_edge(y.rt.root()) == -1);
  const auto& pre = y.rt.preorder_edges();
  REQUIRE(pre.size() == 3);
  CHECK(pre[0] == 0);  // stem first, parents precede children
  CHECK(y.rt.top_vertex(1) == 1);
  CHECK(y.rt.top_vertex(2) == 1);
  CHECK(y.rt.vertex_depth(2) == doctest::Approx(2.0));
  CHECK(y.rt.child_edges(1).size() == 2);
}

TEST_CASE("rooting inside an edge splits it and preserves length") {
  Fixture iv = fixture_interval();
  RootedTree rt = RootedTree::root_at(iv.tree, Location{0, 0.4});
  CHECK(rt.split().did_split);
  CHECK(rt.split().original_edge == 0);
  CHECK(rt.tree().edge_count() == 2);
  CHECK(rt.tree().total_length() == doctest::Approx(1.0));
  double d0 = rt.vertex_depth(0), d1 = rt.vertex_depth(1);
  CHECK(std::min(d0, d1) == doctest::Approx(0.4));
  CHECK(std::max(d0, d1) == doctest::Approx(0.6));
  CHECK(rt.root() == rt.split().new_vertex);
}

TEST_CASE("down and at_down are inverse on every edge") {
  ts::Rooted y = ts::rooted("y_sym");
  for (EdgeId e = 0; e < y.rt.tree().edge_count(); ++e) {
    for (double d : {0.1, 0.5, 0.9}) {
      Location x = y.rt.at_down(e, d);
      CHECK(x.edge == e);
      CHECK(y.rt.down(x) == doctest::Approx(d));
      CHECK(y.rt.depth_of(x) ==
            doctest::Approx(y.rt.vertex_depth(y.rt.top_vertex(e)) + d));
    }
  }
}

TEST_CASE("canonical snaps near-vertex offsets onto the vertex") {
  ts::Rooted y = ts::rooted("y_sym");
  Location near_bottom{0, 1.0 - 1e-13};
  CHECK(y.rt.same_point(near_bottom, y.rt.vertex_location(1)));
  Location c = y.rt.canonical(Location{1, 0.0});
  CHECK(y.rt.same_point(c, y.rt.vertex_location(1)));
  // vertex points rewrite onto the parent edge
  CHECK(c.edge == 0);
}

TEST_CASE("order predicates follow the rooted orientation") {
  ts::Rooted y = ts::rooted("y_sym");
  Location root = y.rt.vertex_location(0);
  Location leaf2 = y.rt.vertex_location(2);
  Location leaf3 = y.rt.vertex_location(3);
  CHECK(y.rt.precedes(root, leaf2));
  CHECK(y.rt.precedes(y.rt.vertex_location(1), leaf3));
  CHECK_FALSE(y.rt.precedes(leaf2, leaf3));
  CHECK_FALSE(y.rt.precedes(leaf2, root));

  CHECK(y.rt.is_strict_ancestor_edge(0, 1));
  CHECK(y.rt.is_strict_ancestor_edge(0, 2));
  CHECK_FALSE(y.rt.is_strict_ancestor_edge(1, 2));
  CHECK_FALSE(y.rt.is_strict_ancestor_edge(1, 1));

  // germ at the top of edge 1 excludes the junction but captures the leaf below
  Location germ = y.rt.at_down(1, 0.0);
  CHECK(y.rt.strictly_below(germ, leaf2));
  CHECK_FALSE(y.rt.strictly_below(germ, y.rt.vertex_location(1)));
  CHECK_FALSE(y.rt.strictly_below(germ, leaf3));
}

TEST_CASE("departing edge picks the branch toward the target") {
  ts::Rooted y = ts::rooted("y_sym");
  auto toward2 = y.rt.departing_edge(1, y.rt.vertex_location(2));
  REQUIRE(toward2.has_value());
  CHECK(y.rt.bottom_vertex(*toward2) == 2);
  CHECK_FALSE(y.rt.departing_edge(1, y.rt.vertex_location(0)).has_value());
  CHECK_FALSE(y.rt.departing_edge(1, y.rt.vertex_location(1)).has_value());
}

TEST_CASE("distance and path agree with arclength") {
  ts::Rooted y = ts::rooted("y_sym");
  Location leaf2 = y.rt.vertex_location(2);
  Location leaf3 = y.rt.vertex_location(3);
  CHECK(y.rt.distance(leaf2, leaf3) == doctest::Approx(2.0));
  CHECK(y.rt.distance(y.rt.vertex_location(0), leaf2) == doctest::Approx(2.0));
  auto steps = y.rt.path(leaf2, leaf3);
  REQUIRE(steps.size() == 2);
  double travelled = 0.0;
  for (auto [e, s, t] : steps) {
    (void)e;
    travelled += std::abs(t - s);
  }
  CHECK(travelled == doctest::Approx(2.0));
  CHECK(y.rt.path(leaf2, leaf2).empty());
}

TEST_CASE("subtree membership and spans respect cuts") {
  ts::Rooted y = ts::rooted("y_sym");
  Subtree whole = whole_tree(y.rt);
  CHECK(subtree_contains(y.rt, whole, Location{1, 0.3}));
  CHECK(subtree_length(y.rt, whole) == doctest::Approx(3.0));

  Subtree trimmed = whole;
  trimmed.cuts.push_back(y.rt.at_down(1, 0.5));
  CHECK(subtree_contains(y.rt, trimmed, y.rt.at_down(1, 0.25)));
  CHECK_FALSE(subtree_contains(y.rt, trimmed, y.rt.at_down(1, 0.75)));
  CHECK(subtree_length(y.rt, trimmed) == doctest::Approx(2.5));

  auto span = kept_span(y.rt, trimmed, 1);
  REQUIRE(span.has_value());
  CHECK(span->first == doctest::Approx(0.0));
  CHECK(span->second == doctest::Approx(0.5));
  auto full = kept_span(y.rt, trimmed, 2);
  REQUIRE(full.has_value());
  CHECK(full->second == doctest::Approx(1.0));
}

TEST_CASE("removing a junction separates its branches") {
  ts::Rooted y = ts::rooted("y_sym");
  auto comps = components_after_removal(y.rt, y.rt.vertex_location(1));
  CHECK(comps.size() == 3);
  double total = 0.0;
  for (const Subtree& c : comps) total += subtree_length(y.rt, c);
  CHECK(total == doctest::Approx(3.0));

  auto two = components_after_removal(y.rt, Location{0, 0.5});
  CHECK(two.size() == 2);
}

TEST_CASE("partition validation flags overlaps and gaps") {
  ts::Rooted iv = ts::rooted("interval");
  Subtree whole = whole_tree(iv.rt);

  Partition good;
  good.parent = whole;
  Subtree top = whole;
  top.cuts.push_back(Location{0, 0.5});
  Subtree bottom;
  bottom.anchor = Location{0, 0.5};
  good.parts = {top, bottom};
  PartitionReport ok = validate_partition(iv.rt, good);
  CHECK(ok.valid);
  CHECK(ok.findings.empty());

  Partition overlapping;
  overlapping.parent = whole;
  Subtree lower;
  lower.anchor = Location{0, 0.5};
  overlapping.parts = {whole, lower};
  PartitionReport bad = validate_partition(iv.rt, overlapping);
  CHECK_FALSE(bad.valid);
  CHECK_FALSE(bad.findings.empty());
  CHECK_FALSE(bad.witnesses.empty());
}

TEST_CASE("fixture lookup covers the bundled instances") {
  CHECK(all_fixtures().size() == 5);
  CHECK(fixture_by_name("b2").tree.edge_count() == 14);
  CHECK_THROWS_AS(fixture_by_name("nope"), std::out_of_range);
}
