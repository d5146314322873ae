#pragma once

#include <vector>

#include "hardytree/partition.hpp"
#include "hardytree/random.hpp"
#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

// Exhaustive minimization of the cover count over cut positions restricted to
// an evenly spaced per-edge grid. Exponential only in the tree size; intended
// for cross-checking the greedy counts on small instances.
struct ExactCoverParams {
  int offsets_per_edge = 32;
  int max_edges = 8;
  int max_degree = 4;           // incident edges per vertex, root included
  std::size_t state_cap = 20000;  // abort threshold for the junction product
  AEvalParams eval;
};

// ran is false when the instance exceeds the size limits (or the state cap),
// or when no partition within the cut grid achieves the target; count is
// meaningful only when ran is true.
struct ExactCoverResult {
  int count = -1;
  bool ran = false;
};

ExactCoverResult exact_cover_count(const RootedTree& t, const StepWeight& u,
                                   const StepWeight& v, PNorm p, double eps,
                                   const ExactCoverParams& prm);

// Random small-tree instances for the packing/cover ratio check. Edges attach
// to uniformly chosen vertices with free degree, so depth and branching vary;
// weights are piecewise constant with one or two pieces per edge.
struct RandomTreeSpec {
  int edges_min = 4;
  int edges_max = 8;
  double len_min = 0.5;
  double len_max = 1.5;
  double val_min = 0.4;
  double val_max = 1.6;
  int max_degree = 4;
  int max_pieces = 2;
};

struct RandomInstance {
  MetricTree tree;
  StepWeight u;
  StepWeight v;
};

RandomInstance random_instance(RandomStream& rng, const RandomTreeSpec& spec);

}  // namespace hardytree
