#pragma once

#include <string>
#include <vector>

#include "hardytree/grid.hpp"
#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

struct infeasible_constraint : std::runtime_error {
  explicit infeasible_constraint(const std::string& what) : std::runtime_error(what) {}
};

struct AlphaP {
  double value = 0.0;
  double error = 0.0;    // two-grid residual; 0 for the analytic anchors
  bool analytic = false;
};

// The unit-interval constant-weight approximation constant: 1/pi at p=2, 1/2
// at p in {1, inf}, numeric with an error estimate otherwise.
AlphaP alpha_p(PNorm p, const GridParams& prm = {});

// sup_x ||u chi_path(root,x)||_{p'} * ||v chi_{y: x precedes y}||_p. Candidates
// are all weight breakpoints plus a uniform per-edge grid; both factors are in
// closed form, so the returned value never exceeds the true supremum.
double norm_lower_bound(const RootedTree& t, const StepWeight& u, const StepWeight& v, PNorm p);

// ||u||_{p'} along the root-to-x path (exact for step weights).
double path_dual_norm(const RootedTree& t, const StepWeight& u, PNorm p, Location x);

// Deepest common point of x and y in the rooted order.
Location meet_point(const RootedTree& t, Location x, Location y);

// Minimal ||f||_p over f >= 0 with int_{path(root,t_j)} f |u| = 1 for every
// boundary point. Single constraint: Hoelder closed form. p=2: Gram solve.
// Otherwise projected-subgradient descent on a quadrature grid. Throws
// infeasible_constraint when u vanishes along some constraint path.
double alpha_K(const RootedTree& t, const StepWeight& u, PNorm p,
               const std::vector<Location>& boundary, const GridParams& prm = {});

// First points at which U = int u^{p'} reaches the level, one per crossing
// edge; empty when the level exceeds max U.
std::vector<Location> u_level_crossings(const RootedTree& t, const StepWeight& u, PNorm p,
                                        double level);

struct BoundednessRow {
  double level = 0.0;
  double alpha = 0.0;  // alpha_K of the level set
  double tail = 0.0;   // ||v||_p outside the level set
  double value = 0.0;  // tail / alpha
};

struct BoundednessReport {
  double a_hat = 0.0;    // best lower estimate of the sup over K
  double op_norm = 0.0;
  double ratio = 0.0;    // op_norm / a_hat
  bool lower_ok = true;  // a_hat <= op_norm
  std::vector<BoundednessRow> rows;
};

// Scans downward-closed level sets K = {U <= c} of u^{p'} (uniform levels plus
// a golden polish around the best), evaluating tail/alpha_K for each. The
// two-sided theory puts op_norm between a_hat and 4*a_hat when the family is
// rich enough; the ratio is reported for the caller to judge.
BoundednessReport boundedness_check(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                    PNorm p, int levels = 64, const GridParams& prm = {});

struct IntervalBoundsRow {
  std::string name;
  double alpha = 0.0;  // sweep parameter when the row depends on one
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;    // lhs <= rhs + slack
};

struct IntervalBoundsReport {
  std::vector<IntervalBoundsRow> rows;
  double target = 0.0;  // int |u| |v| over the interval (the section-5 limit mass)
  bool all_pass = true;
};

// Interval-only comparisons for the endpoint exponents: the constant-weight
// value dominates, the rearrangement bound minorizes, and the gap bound holds
// across the alpha sweep. pinf_side picks the p=infinity family (u constant,
// v stepped); otherwise the p=1 family (v constant, u stepped). Throws
// std::domain_error when the tree branches.
IntervalBoundsReport p1_inf_bounds(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                   bool pinf_side,
                                   const std::vector<double>& alphas = {1.1, 2.0, 5.0, 10.0});

// Branching-bound cap for regular trees whose root-to-vertex path lengths grow
// by at least mu1 > 1 per generation: b^ceil(log 2 / log mu1 + 1).
double regular_tree_b_bound(int b, double mu1);

}  // namespace hardytree
