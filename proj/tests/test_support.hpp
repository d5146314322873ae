#pragma once

#include "hardytree/fixtures.hpp"
#include "hardytree/partition.hpp"

namespace test_support {

// Fixture rooted at its stored root, weights carried through the edge split.
struct Rooted {
  hardytree::RootedTree rt;
  hardytree::StepWeight u;
  hardytree::StepWeight v;
};

inline Rooted rooted(const hardytree::Fixture& fx) {
  hardytree::RootedTree rt = hardytree::RootedTree::root_at(fx.tree, fx.root);
  return {rt, hardytree::split_weight(fx.u, rt.split()), hardytree::split_weight(fx.v, rt.split())};
}

inline Rooted rooted(const std::string& name) {
  return rooted(hardytree::fixture_by_name(name));
}

inline hardytree::GridParams grid(int per_edge, int min_nodes = 0) {
  hardytree::GridParams g;
  g.per_edge = per_edge;
  g.min_nodes = min_nodes;
  return g;
}

inline hardytree::AEvalParams eval_params(int per_edge, int min_nodes = 0) {
  hardytree::AEvalParams ap;
  ap.grid = grid(per_edge, min_nodes);
  return ap;
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace test_support
