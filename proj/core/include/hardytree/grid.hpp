#pragma once

#include <utility>
#include <vector>

#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

// One composite-midpoint cell. parent is the previous cell toward the
// region's anchor (-1 starts a chain), so parents always precede children in
// index order.
struct GridNode {
  Location loc;
  double q = 0.0;  // cell length
  double u = 0.0;
  double v = 0.0;
  int parent = -1;
};

struct GridParams {
  int per_edge = 256;  // target cells per edge (cells align to weight pieces)
  int min_nodes = 0;   // scale cell counts up until the total reaches this
  // extra piece boundaries, (edge, down-coordinate); cells never straddle them
  std::vector<std::pair<EdgeId, double>> extra_breaks;

  GridParams doubled() const {
    GridParams g = *this;
    g.per_edge *= 2;
    g.min_nodes *= 2;
    return g;
  }
};

// Quadrature grid over a subtree region. Cell layout depends only on the
// weight pieces and the region, never on any root choice, which makes the
// discrete quotient quantities exactly root-invariant.
struct QuadGrid {
  std::vector<GridNode> nodes;
  std::vector<std::vector<int>> edge_nodes;  // node indices per edge, top to bottom
  Subtree region;

  int size() const { return static_cast<int>(nodes.size()); }
};

QuadGrid build_grid(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                    const Subtree& k, const GridParams& prm);

// Parent array reoriented so that chains grow away from the point x (the
// integration base point of T_x). Entries of -1 mark chain starts at x.
std::vector<int> reroot_parents(const RootedTree& t, const QuadGrid& g, Location x);

// Weighted l^p norm of a grid vector: (sum q_i |f_i|^p)^{1/p}, max at p=inf.
double grid_norm(const QuadGrid& g, const std::vector<double>& f, PNorm p);

}  // namespace hardytree
