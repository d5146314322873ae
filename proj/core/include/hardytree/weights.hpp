#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hardytree/tree.hpp"

namespace hardytree {

struct invalid_weight : std::runtime_error {
  explicit invalid_weight(const std::string& what) : std::runtime_error(what) {}
};

struct unsupported_exponent : std::runtime_error {
  explicit unsupported_exponent(const std::string& what) : std::runtime_error(what) {}
};

struct WeightSegment {
  double len = 0.0;
  double value = 0.0;  // nonnegative
};

// Piecewise-constant weight: one segment list per edge, oriented from the
// edge's 'from' endpoint; lengths sum to the edge length.
struct StepWeight {
  std::vector<std::vector<WeightSegment>> per_edge;

  static StepWeight constant(const MetricTree& t, double value);
  // Throws invalid_weight when a segment list mismatches its edge (1e-9
  // length tolerance) or carries a negative value.
  void validate(const MetricTree& t) const;
};

// Exponent p in [1, inf] with its conjugate; infinity stored as +inf.
struct PNorm {
  double p = 2.0;

  static PNorm of(double p);
  bool is_inf() const { return std::isinf(p); }
  bool is_one() const { return p == 1.0; }
  // 1/p + 1/p' = 1; p=1 -> inf, p=inf -> 1.
  double conjugate() const;
};

// Weight value at an interior offset (from-coordinates); offsets are assumed
// to avoid breakpoints (quadrature midpoints do by construction).
double value_at(const StepWeight& w, EdgeId e, double offset);

// Segments of edge e listed top-to-bottom in the rooted orientation.
std::vector<WeightSegment> down_segments(const RootedTree& t, const StepWeight& w, EdgeId e);

// ||w||_{p,K}; exact closed form (p=inf -> essential sup over K).
double lp_norm(const RootedTree& t, const StepWeight& w, PNorm p, const Subtree& k);

// mu(K) = int_K v^p (p finite) or int_K v (p = inf).
double mu(const RootedTree& t, const StepWeight& v, PNorm p, const Subtree& k);

// int_K u v with both step weights, exact via merged breakpoints.
double product_integral(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                        const Subtree& k);

// U(x) = int over path(root, x) of u^{p'}; throws unsupported_exponent at p=1.
double primitive_U(const RootedTree& t, const StepWeight& u, PNorm p, Location x);

// Nonincreasing rearrangement of a segment list (sort by value, descending).
std::vector<WeightSegment> rearrange_desc(std::vector<WeightSegment> segs);

// sup_t g*(t)·t for the rearrangement of the given segments.
double rearrangement_sup_t(const std::vector<WeightSegment>& segs);

// Local essential supremum at x: max over germ-adjacent segment values, all
// incident edges included at a vertex.
double local_ess_sup(const RootedTree& t, const StepWeight& w, Location x);

// Weight for the split tree produced by RootedTree::root_at.
StepWeight split_weight(const StepWeight& w, const SplitRecord& rec);

}  // namespace hardytree
