#pragma once

#include <string>
#include <vector>

#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

// One connected component of a dyadic level band of U(x) = int_root^x u^{p'}.
struct SigmaComponent {
  Subtree region;
  double mu = 0.0;          // int_region v^p
  double sigma = 0.0;       // (2^k mu)^{1/p}
  int boundary_count = 0;   // extreme points of the component minus its root
};

struct SigmaBand {
  int k = 0;
  double mu_total = 0.0;    // includes zero-mass components dropped from the list
  double sigma = 0.0;       // (2^k mu_total)^{1/p}
  std::vector<SigmaComponent> components;
};

// Dyadic decomposition of the tree by U-level. Bands run top-down from the
// largest populated k; the loop stops once the geometric bound on the
// remaining mass drops below 1e-12 of the accumulated total (hard floor of
// 80 bands). Empty bands in the middle are kept: a u-plateau band can carry
// no v-mass while lower bands still do.
struct SigmaTable {
  double p = 2.0;
  std::vector<SigmaBand> bands;  // ascending k
  bool truncated = false;
  int k_floor = 0;                 // smallest k evaluated
  double sigma_p_mass = 0.0;       // sum of 2^k mu over evaluated bands
  double dropped_mass_bound = 0.0; // geometric bound on what the cut discarded

  double sup_sigma() const;
  // || {sigma_{k,i}} ||_{l^q} over components.
  double lq_components(double q) const;
  // || {sigma_k} ||_{l^q} over bands.
  double lq_bands(double q) const;
  // || {B_{k,i}^{1/p'} sigma_{k,i}} ||_{l^q} over components.
  double lq_weighted(double q) const;
  double weak_lq_components(double q) const;
  // Per-band sums N_k = sum_i B^{1/p'} sigma_{k,i}, taken in weak-l^q over k.
  double weak_lq_weighted_bands(double q) const;
};

// Builds the table for the whole tree; requires 1 < p < infinity. u identically
// zero yields an empty table.
SigmaTable sigma_table(const RootedTree& t, const StepWeight& u, const StepWeight& v, PNorm p);

struct BoundCheckRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;   // lhs/rhs, 0 when rhs vanishes with lhs
  bool asserted = false; // explicit-constant inequalities only
  bool pass = true;      // asserted rows: lhs <= rhs + slack; others: finiteness
};

struct BoundCheckReport {
  std::vector<BoundCheckRow> rows;
  bool all_pass = true;
};

// Sequence-norm comparisons between the singular spectrum and the band table.
// Rows with an explicit constant are asserted: sup sigma <= ||T|| and, for each
// (eps, M) packing count, eps^q M <= (2^{2/p+2})^q sum B^{q/p'} sigma^q at
// q in {1, 2}. The remaining comparisons carry unspecified constants and are
// reported as ratios only.
BoundCheckReport lq_bound_checks(const std::vector<double>& approx_numbers,
                                 const SigmaTable& table, double op_norm_value,
                                 const std::vector<std::pair<double, int>>& eps_packing_counts,
                                 PNorm p);

}  // namespace hardytree
