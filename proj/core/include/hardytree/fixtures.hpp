#pragma once

#include <string>
#include <vector>

#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

// A ready-to-use test problem: tree, weights, rooting point, and the exact
// value of the integral of u*v over the whole tree (known in closed form for
// every bundled instance).
struct Fixture {
  std::string name;
  MetricTree tree;
  StepWeight u;
  StepWeight v;
  Location root;
  double uv_integral;
};

// Unit interval (0,1), u = v = 1, rooted at the left end.
Fixture fixture_interval();

// Path (0,4) built from four unit edges, u = v = 1.
Fixture fixture_path04();

// Symmetric Y: unit stem, two unit branches, u = v = 1.
Fixture fixture_y_sym();

// Full binary tree, three generations of unit edges, u = 1 and v halving
// per generation (1, 1/2, 1/4).
Fixture fixture_binary3();

// Regular branching-2 tree with geometrically growing edges: generation k
// has 2^k edges of length 2^k, u = 1, v = 2^{-k}. Every internal vertex has
// branching number 2 and the child/parent edge-length ratio is constant.
Fixture fixture_b2();

// All five, in the order above.
std::vector<Fixture> all_fixtures();

// Lookup by the names used on the command line ("interval", "path04",
// "y_sym", "binary3", "b2"). Throws std::out_of_range for unknown names.
Fixture fixture_by_name(const std::string& name);

}  // namespace hardytree
