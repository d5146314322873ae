#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "hardytree/hardy_operator.hpp"
#include "hardytree/linalg.hpp"
#include "hardytree/partition.hpp"
#include "hardytree/random.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("interval singular values match the classical spectrum") {
  ts::Rooted r = ts::rooted("interval");
  std::vector<double> sv =
      approx_numbers_p2(r.rt, r.u, r.v, whole_tree(r.rt), 6, ts::grid(512));
  REQUIRE(sv.size() == 6);
  for (int n = 1; n <= 6; ++n) {
    double exact = 2.0 / ((2.0 * n - 1.0) * ts::kPi);
    CHECK(std::abs(sv[n - 1] - exact) / exact < 1e-4);
  }
}

TEST_CASE("operator norm closed forms at the endpoint exponents") {
  ts::Rooted r = ts::rooted("interval");
  Subtree whole = whole_tree(r.rt);
  NormResult inf_norm = op_norm(r.rt, r.u, r.v, whole, PNorm::of(kInf), ts::grid(64));
  CHECK(inf_norm.value == doctest::Approx(1.0));
  CHECK_FALSE(inf_norm.flagged);
  NormResult one_norm = op_norm(r.rt, r.u, r.v, whole, PNorm::of(1.0), ts::grid(64));
  CHECK(one_norm.value == doctest::Approx(1.0));
  CHECK(op_norm_closed_pinf(r.rt, r.u, r.v, whole, r.rt.vertex_location(0)) ==
        doctest::Approx(1.0));
  CHECK(op_norm_closed_p1(r.rt, r.u, r.v, whole) == doctest::Approx(1.0));
}

TEST_CASE("richardson norm hits the interval constant to high accuracy") {
  ts::Rooted r = ts::rooted("interval");
  double norm = op_norm_rich(r.rt, r.u, r.v, whole_tree(r.rt), PNorm::of(2.0), ts::grid(256));
  CHECK(std::abs(norm - 2.0 / ts::kPi) < 1e-9);
}

TEST_CASE("A values of the bundled instances") {
  ts::Rooted iv = ts::rooted("interval");
  CHECK(std::abs(a_value_rich(iv.rt, iv.u, iv.v, whole_tree(iv.rt), PNorm::of(2.0),
                              ts::grid(64)) -
                 1.0 / ts::kPi) < 1e-7);

  ts::Rooted p4 = ts::rooted("path04");
  CHECK(std::abs(a_value_rich(p4.rt, p4.u, p4.v, whole_tree(p4.rt), PNorm::of(2.0),
                              ts::grid(64)) -
                 4.0 / ts::kPi) < 1e-6);

  ts::Rooted b2 = ts::rooted("b2");
  CHECK(a_value_rich(b2.rt, b2.u, b2.v, whole_tree(b2.rt), PNorm::of(2.0),
                     ts::grid(48, 64)) == doctest::Approx(1.90985931711).epsilon(1e-6));
}

TEST_CASE("deflation and the root scan compute the same invariant") {
  ts::Rooted y = ts::rooted("y_sym");
  Subtree whole = whole_tree(y.rt);
  double deflated = a_value_rich(y.rt, y.u, y.v, whole, PNorm::of(2.0), ts::grid(48, 64));
  double scanned = min_norm_over_roots_rich(y.rt, y.u, y.v, whole, PNorm::of(2.0),
                                            ts::grid(48, 64));
  CHECK(std::abs(deflated - scanned) / scanned < 1e-4);
  CHECK(std::abs(deflated - 2.0 / ts::kPi) < 1e-4);
}

TEST_CASE("the interval root scan lands mid-edge") {
  ts::Rooted r = ts::rooted("interval");
  RootScanResult rs =
      min_norm_over_roots(r.rt, r.u, r.v, whole_tree(r.rt), PNorm::of(2.0), ts::grid(128));
  CHECK_FALSE(rs.flagged);
  CHECK(std::abs(rs.value - 1.0 / ts::kPi) < 1e-3);
  CHECK(r.rt.down(rs.argmin) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("norm and A scale linearly with the weights at p = 2") {
  ts::Rooted y = ts::rooted("y_sym");
  Subtree whole = whole_tree(y.rt);
  StepWeight su = y.u;
  for (auto& e : su.per_edge)
    for (auto& s : e) s.value *= 1.7;
  double base = op_norm_rich(y.rt, y.u, y.v, whole, PNorm::of(2.0), ts::grid(64));
  double scaled = op_norm_rich(y.rt, su, y.v, whole, PNorm::of(2.0), ts::grid(64));
  CHECK(scaled == doctest::Approx(1.7 * base).epsilon(1e-10));
  double abase = a_value_rich(y.rt, y.u, y.v, whole, PNorm::of(2.0), ts::grid(64));
  double ascaled = a_value_rich(y.rt, su, y.v, whole, PNorm::of(2.0), ts::grid(64));
  CHECK(ascaled == doctest::Approx(1.7 * abase).epsilon(1e-10));
}

TEST_CASE("matrix-free application agrees with the materialized kernel") {
  ts::Rooted y = ts::rooted("y_sym");
  DiscretizedOperator op =
      discretize(y.rt, y.u, y.v, whole_tree(y.rt), PNorm::of(2.0), ts::grid(64));
  const int n = op.grid.size();
  REQUIRE(n > 0);
  std::vector<double> mat = weighted_matrix(op.grid);
  double dense_top = top_singular_value(mat, n, n);
  NormResult nr = op_norm(y.rt, y.u, y.v, whole_tree(y.rt), PNorm::of(2.0), ts::grid(64));
  CHECK(dense_top == doctest::Approx(nr.value).epsilon(1e-9));

  // Rayleigh quotient of any vector under apply() stays below the norm.
  RandomStream rs(7);
  std::vector<double> f(n);
  for (double& x : f) x = rs.uniform() - 0.5;
  std::vector<double> tf = hardytree::apply(op, f);
  double fn = 0.0, tn = 0.0;
  for (int i = 0; i < n; ++i) {
    fn += op.grid.nodes[i].q * f[i] * f[i];
    tn += op.grid.nodes[i].q * tf[i] * tf[i];
  }
  CHECK(std::sqrt(tn) <= std::sqrt(fn) * nr.value * (1.0 + 1e-9));
}

TEST_CASE("the optimal shift recenters the image") {
  ts::Rooted r = ts::rooted("interval");
  DiscretizedOperator op =
      discretize(r.rt, r.u, r.v, whole_tree(r.rt), PNorm::of(2.0), ts::grid(128));
  std::vector<double> ones(op.grid.size(), 1.0);
  ShiftResult sh = argmin_shift(op, ones);
  CHECK_FALSE(sh.degenerate);
  CHECK(sh.c == doctest::Approx(0.5).epsilon(1e-6));

  StepWeight zero_v = StepWeight::constant(r.rt.tree(), 0.0);
  DiscretizedOperator op0 =
      discretize(r.rt, r.u, zero_v, whole_tree(r.rt), PNorm::of(2.0), ts::grid(64));
  CHECK(argmin_shift(op0, ones).degenerate);
}

TEST_CASE("a greedy partition yields a finite-rank approximant within threshold reach") {
  ts::Rooted p4 = ts::rooted("path04");
  Subtree whole = whole_tree(p4.rt);
  const double eps = 0.5;
  EpsPartitionResult part =
      eps_partition(p4.rt, p4.u, p4.v, whole, PNorm::of(2.0), eps, ts::eval_params(48, 64));
  REQUIRE(part.count == 3);
  FiniteRankApproximant fr =
      finite_rank_approximant(p4.rt, p4.u, p4.v, part.partition, PNorm::of(2.0), ts::grid(96));
  CHECK(fr.rank <= part.count);
  NormResult rem = op_minus_approximant_norm(fr, PNorm::of(2.0));
  std::vector<double> sv = approx_numbers_p2(p4.rt, p4.u, p4.v, whole, fr.rank + 1, ts::grid(96));
  // a rank-r map can never beat a_{r+1}, and the part-wise threshold caps it
  CHECK(rem.value >= sv[fr.rank] - 1e-6);
  CHECK(rem.value <= std::sqrt(2.0) * eps + 1e-2);
}
