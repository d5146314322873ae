#include <cmath>
#include <vector>

#include "doctest.h"
#include "hardytree/exact_cover.hpp"
#include "hardytree/partition.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

TEST_CASE("interval cover counts follow the reciprocal law") {
  ts::Rooted r = ts::rooted("interval");
  Subtree whole = whole_tree(r.rt);
  AEvalParams ap = ts::eval_params(48, 64);
  struct Row {
    double eps;
    int n;
  };
  for (Row row : {Row{0.2, 2}, Row{0.1, 4}, Row{0.05, 7}}) {
    EpsPartitionResult part = eps_partition(r.rt, r.u, r.v, whole, PNorm::of(2.0), row.eps, ap);
    CHECK(part.count == row.n);
    CHECK_FALSE(part.estimate);
    CHECK(static_cast<int>(part.partition.parts.size()) == part.count);
    PartitionReport rep = validate_partition(r.rt, part.partition);
    CHECK(rep.valid);
    CHECK(rep.findings.empty());

    EpsPackingResult pack = eps_packing(r.rt, r.u, r.v, whole, PNorm::of(2.0), row.eps, ap);
    CHECK(pack.count <= part.count);
    CHECK(part.count - pack.count <= 2);
  }
}

TEST_CASE("every part of a greedy cover meets its threshold") {
  ts::Rooted y = ts::rooted("y_sym");
  Subtree whole = whole_tree(y.rt);
  AEvalParams ap = ts::eval_params(48, 64);
  const double eps = 0.25;
  EpsPartitionResult part = eps_partition(y.rt, y.u, y.v, whole, PNorm::of(2.0), eps, ap);
  REQUIRE(part.count >= 1);
  bool flag = false;
  for (const Subtree& piece : part.partition.parts) {
    double a = eval_a(y.rt, y.u, y.v, piece, PNorm::of(2.0), ap, &flag);
    CHECK(a <= eps * (1.0 + 1e-6));
  }
  CHECK(validate_partition(y.rt, part.partition).valid);

  // packed regions all sit strictly above the threshold
  EpsPackingResult pack = eps_packing(y.rt, y.u, y.v, whole, PNorm::of(2.0), eps, ap);
  for (const Subtree& region : pack.regions) {
    double a = eval_a(y.rt, y.u, y.v, region, PNorm::of(2.0), ap, &flag);
    CHECK(a > eps * (1.0 - 1e-6));
  }
}

TEST_CASE("restriction can only shrink the approximation value") {
  ts::Rooted r = ts::rooted("interval");
  Subtree whole = whole_tree(r.rt);
  AEvalParams ap = ts::eval_params(48, 64);
  bool flag = false;
  double a_whole = eval_a(r.rt, r.u, r.v, whole, PNorm::of(2.0), ap, &flag);
  CHECK(std::abs(a_whole - 1.0 / ts::kPi) < 1e-6);

  Subtree half = whole;
  half.cuts.push_back(Location{0, 0.5});
  double a_half = eval_a(r.rt, r.u, r.v, half, PNorm::of(2.0), ap, &flag);
  CHECK(a_half <= a_whole + 1e-9);
  CHECK(std::abs(a_half - 0.5 / ts::kPi) < 1e-6);
}

TEST_CASE("two-sided spectral sandwich at fixed thresholds") {
  ts::Rooted p4 = ts::rooted("path04");
  Subtree whole = whole_tree(p4.rt);
  for (double eps : {0.5, 0.3}) {
    SandwichReport rep = sandwich_check(p4.rt, p4.u, p4.v, whole, PNorm::of(2.0), eps,
                                        ts::eval_params(48, 64), ts::grid(256));
    CHECK(rep.upper_ok);
    CHECK(rep.lower_ok);
    CHECK(rep.n_upper >= rep.m_lower);
    CHECK(rep.a_n_plus_1 <= eps * (1.0 + 1e-9));
  }
}

TEST_CASE("greedy counts bracket the exhaustive optimum") {
  ts::Rooted y = ts::rooted("y_sym");
  Subtree whole = whole_tree(y.rt);
  AEvalParams ap = ts::eval_params(48, 64);
  ExactCoverParams xp;
  xp.eval = ts::eval_params(24, 32);
  for (double eps : {0.4, 0.3}) {
    ExactCoverResult ex = exact_cover_count(y.rt, y.u, y.v, PNorm::of(2.0), eps, xp);
    REQUIRE(ex.ran);
    EpsPartitionResult part = eps_partition(y.rt, y.u, y.v, whole, PNorm::of(2.0), eps, ap);
    EpsPackingResult pack = eps_packing(y.rt, y.u, y.v, whole, PNorm::of(2.0), eps, ap);
    CHECK(ex.count <= part.count);
    CHECK(ex.count <= 3 * (pack.count + 1));
  }
}

TEST_CASE("scan rows carry both counting products toward the target") {
  ts::Rooted r = ts::rooted("interval");
  Subtree whole = whole_tree(r.rt);
  std::vector<double> schedule{0.2, 0.1, 0.05};
  double target = 1.0 / ts::kPi;
  std::vector<ScanRow> rows = asymptotic_scan(r.rt, r.u, r.v, whole, PNorm::of(2.0), schedule,
                                              ts::eval_params(48, 64), target);
  REQUIRE(rows.size() == 3);
  int expected_n[] = {2, 4, 7};
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].eps == doctest::Approx(schedule[i]));
    CHECK(rows[i].n_upper == expected_n[i]);
    CHECK(rows[i].m_lower <= rows[i].n_upper);
    CHECK(rows[i].eps_n == doctest::Approx(rows[i].eps * rows[i].n_upper));
    CHECK(rows[i].target == doctest::Approx(target));
    CHECK(rows[i].eps_n >= target * (1.0 - 1e-9));  // cover product dominates the limit
  }
}
