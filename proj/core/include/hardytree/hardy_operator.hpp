#pragma once

#include <optional>

#include "hardytree/grid.hpp"
#include "hardytree/linalg.hpp"
#include "hardytree/tree.hpp"
#include "hardytree/weights.hpp"

namespace hardytree {

// Discretized T_{a,K}: quadrature grid plus exponent. The kernel action is
// matrix-free through the grid's parent chains; weighted_matrix materializes
// the p=2 matrix on demand.
struct DiscretizedOperator {
  const RootedTree* host = nullptr;
  PNorm p{2.0};
  QuadGrid grid;
};

DiscretizedOperator discretize(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                               const Subtree& k, PNorm p, const GridParams& prm);

// (Tf)(x_i) = v_i * sum_{x_j <= x_i} u_j q_j f_j along the parent chains.
std::vector<double> apply(const DiscretizedOperator& op, const std::vector<double>& f);
std::vector<double> apply_chains(const QuadGrid& g, const std::vector<int>& parents,
                                 const std::vector<double>& f);
// Adjoint chains: (T*psi)_j = u_j * sum_{x_i >= x_j} v_i psi_i q_i.
std::vector<double> apply_adjoint_chains(const QuadGrid& g, const std::vector<int>& parents,
                                         const std::vector<double>& psi);

// Kernel matrix between the quadrature-weighted l2 spaces,
// S[i][j] = sqrt(q_i) v_i u_j sqrt(q_j) [x_j <= x_i], returned as a
// column-major buffer holding S^T (singular values are unaffected).
std::vector<double> weighted_matrix(const QuadGrid& g);
std::vector<double> weighted_matrix(const QuadGrid& g, const std::vector<int>& parents);

struct NormResult {
  double value = 0.0;
  bool flagged = false;  // ascent stagnated / heuristic path
};

// Operator norm of T rooted at the tree root: p=2 via SVD, p=1 and p=inf via
// exact closed forms, otherwise dual-exponent ascent (flagged lower bound).
NormResult op_norm(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                   const Subtree& k, PNorm p, const GridParams& prm);

// ||T_x||: integration base moved to x (closed forms at p=1, inf; rerooted
// chains otherwise).
NormResult op_norm_from(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                        const Subtree& k, PNorm p, const GridParams& prm, Location x);

double op_norm_closed_pinf(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                           const Subtree& k, Location x);
double op_norm_closed_p1(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                         const Subtree& k);

// First `count` singular values of the discretized operator on the weighted
// spaces (the approximation numbers at p=2).
std::vector<double> approx_numbers_p2(const RootedTree& t, const StepWeight& u,
                                      const StepWeight& v, const Subtree& k, int count,
                                      const GridParams& prm);

struct AValueResult {
  double value = 0.0;
  bool flagged = false;            // heuristic (p=1) or unconverged ascent
  std::optional<Location> root;    // minimizing root when a root scan ran
};

struct RootScanResult {
  double value = 0.0;
  Location argmin;
  bool flagged = false;
};

// min_x ||T_x|| over base points x in K: candidate vertices plus 16 interior
// samples per edge, then golden-section refinement on the best edge;
// value-ties resolve to the smallest (edge, offset).
RootScanResult min_norm_over_roots(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                   const Subtree& k, PNorm p, const GridParams& prm);
double min_norm_over_roots_rich(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                const Subtree& k, PNorm p, const GridParams& prm);

// A(K): p=2 deflates span{v} out of the weighted kernel matrix; 1<p<=inf
// minimizes ||T_x|| over roots x in K; p=1 evaluates the delta-extremal
// formula (flagged as an estimate).
AValueResult a_value(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                     const Subtree& k, PNorm p, const GridParams& prm);

// Two-grid Richardson extrapolation (4*A(h) - A(2h)) / 3 of the scalar A;
// the midpoint quadrature converges at second order, so this cancels the h^2
// term. Identity at p=1, inf where the evaluation is closed-form.
double a_value_rich(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                    const Subtree& k, PNorm p, const GridParams& prm);
double op_norm_rich(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                    const Subtree& k, PNorm p, const GridParams& prm);

struct ShiftResult {
  double c = 0.0;
  bool degenerate = false;  // v vanishes on K
};

// The unique scalar attaining inf_c ||Tf - c v||_p on K (1 < p <= inf).
ShiftResult argmin_shift(const DiscretizedOperator& op, const std::vector<double>& f);

struct FiniteRankApproximant {
  int rank = 0;
  QuadGrid grid;                            // parent grid, cells aligned to parts
  std::vector<int> part_of;                 // node -> part index
  std::vector<std::vector<double>> coeffs;  // per part: scalar functional on f
  std::vector<double> vmask;                // chi_{part} v at nodes
};

// P f = sum_i chi_i v [ int_a^{a_i} u f + w_i(...) ]; rank <= #parts. The
// averaging functional w_i follows the mu-average at p=2 and the
// minimizing-root primitive otherwise.
FiniteRankApproximant finite_rank_approximant(const RootedTree& t, const StepWeight& u,
                                              const StepWeight& v, const Partition& parts,
                                              PNorm p, const GridParams& prm);

std::vector<double> apply_approximant(const FiniteRankApproximant& fr,
                                      const std::vector<double>& f);

// ||T - P|| on the approximant's grid (SVD at p=2, ascent otherwise).
NormResult op_minus_approximant_norm(const FiniteRankApproximant& fr, PNorm p);

}  // namespace hardytree
