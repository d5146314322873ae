#pragma once

#include "hardytree/hardy_operator.hpp"

namespace hardytree {

// Shared A-evaluation policy for the greedy passes: Richardson pair on top of
// the base grid when the exponent route is grid-based.
struct AEvalParams {
  GridParams grid;
  bool richardson = true;
};

// A(region) under the policy; clamped at 0, flag accumulates heuristic or
// unconverged evaluations.
double eval_a(const RootedTree& t, const StepWeight& u, const StepWeight& v, const Subtree& region,
              PNorm p, const AEvalParams& ap, bool* flag);

// Greedy subdivision: the minimal-by-construction count of parts covering K
// with A(part) <= eps. Parts are emitted leaf-to-root; crossings on an edge
// are located by bisection to edge_length * 1e-6.
struct EpsPartitionResult {
  int count = 0;
  Partition partition;
  bool estimate = false;  // A values were heuristic (p=1) or flagged ascents
};

EpsPartitionResult eps_partition(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                 const Subtree& k, PNorm p, double eps, const AEvalParams& ap);

// Greedy packing: pairwise-disjoint regions with A(region) > eps, claimed at
// the strict side of each crossing; the final pending region is discarded.
struct EpsPackingResult {
  int count = 0;
  std::vector<Subtree> regions;
  bool estimate = false;
};

EpsPackingResult eps_packing(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                             const Subtree& k, PNorm p, double eps, const AEvalParams& ap);

// Two-sided check at one threshold (p=2): a_{N+1} <= eps (upper slack) and
// a_M >= eps (lower slack), singular values taken on the spectrum grid.
struct SandwichReport {
  double eps = 0.0;
  int n_upper = 0;
  int m_lower = 0;
  double a_n_plus_1 = 0.0;
  double a_m = 0.0;  // 0 when M = 0
  bool upper_ok = false;
  bool lower_ok = false;  // vacuously true when M = 0
};

SandwichReport sandwich_check(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                              const Subtree& k, PNorm p, double eps, const AEvalParams& ap,
                              const GridParams& spectrum_grid, double upper_slack = 0.0,
                              double lower_slack = 5e-3);

struct ScanRow {
  double eps = 0.0;
  int n_upper = 0;
  int m_lower = 0;
  double eps_n = 0.0;
  double eps_m = 0.0;
  double target = 0.0;  // the common limit both products approach
};

// Counting products over a decreasing threshold schedule; target is supplied
// by the caller (limit alpha_p * int |u||v|).
std::vector<ScanRow> asymptotic_scan(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                     const Subtree& k, PNorm p, const std::vector<double>& schedule,
                                     const AEvalParams& ap, double target);

}  // namespace hardytree
