#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "doctest.h"
#include "hardytree/asymptotics.hpp"
#include "hardytree/hardy_operator.hpp"
#include "hardytree/partition.hpp"
#include "hardytree/sigma.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

namespace {

const SigmaComponent* single_component(const SigmaTable& t, int k) {
  for (const SigmaBand& b : t.bands)
    if (b.k == k) {
      REQUIRE(b.components.size() == 1);
      return &b.components[0];
    }
  REQUIRE(false);
  return nullptr;
}

}  // namespace

TEST_CASE("path level bands are the dyadic tail pieces") {
  ts::Rooted p4 = ts::rooted("path04");
  SigmaTable t = sigma_table(p4.rt, p4.u, p4.v, PNorm::of(2.0));
  CHECK(t.bands.size() == 43);
  CHECK(t.k_floor == -40);
  // positive u descends the dyadic ladder forever; the cut is the normal exit
  CHECK(t.truncated);
  CHECK(t.dropped_mass_bound < 1e-12 * t.sigma_p_mass);
  CHECK(t.sup_sigma() == doctest::Approx(2.0));
  CHECK(t.sigma_p_mass == doctest::Approx(16.0 / 3.0));
  CHECK(t.lq_components(2.0) == doctest::Approx(4.0 / std::sqrt(3.0)));

  const SigmaComponent* top = single_component(t, 1);
  CHECK(top->mu == doctest::Approx(2.0));
  CHECK(top->sigma == doctest::Approx(2.0));
  CHECK(top->boundary_count == 1);
  const SigmaComponent* mid = single_component(t, 0);
  CHECK(mid->mu == doctest::Approx(1.0));
  CHECK(mid->sigma == doctest::Approx(1.0));
  CHECK(single_component(t, -1)->sigma == doctest::Approx(0.5));
  CHECK(single_component(t, -2)->sigma == doctest::Approx(0.25));
  CHECK(single_component(t, -3)->sigma == doctest::Approx(0.125));
}

TEST_CASE("branching shows up as component multiplicity and boundary counts") {
  ts::Rooted y = ts::rooted("y_sym");
  SigmaTable t = sigma_table(y.rt, y.u, y.v, PNorm::of(2.0));
  const SigmaComponent* top = single_component(t, 0);
  CHECK(top->mu == doctest::Approx(2.0));
  CHECK(top->sigma == doctest::Approx(std::sqrt(2.0)));
  CHECK(top->boundary_count == 2);
  const SigmaComponent* below = single_component(t, -1);
  CHECK(below->mu == doctest::Approx(0.5));
  CHECK(below->boundary_count == 1);

  ts::Rooted b2 = ts::rooted("b2");
  SigmaTable bt = sigma_table(b2.rt, b2.u, b2.v, PNorm::of(2.0));
  std::map<int, int> sizes;
  int max_b = 0;
  for (const SigmaBand& band : bt.bands) {
    sizes[band.k] = static_cast<int>(band.components.size());
    for (const SigmaComponent& c : band.components) max_b = std::max(max_b, c.boundary_count);
  }
  CHECK(sizes[2] == 4);
  CHECK(sizes[3] == 8);
  for (const SigmaBand& band : bt.bands)
    if (band.k == 2)
      for (const SigmaComponent& c : band.components) {
        CHECK(c.mu == doctest::Approx(0.1875));
        CHECK(c.sigma == doctest::Approx(0.866025403784));
        CHECK(c.boundary_count == 2);
      }
  // geometric branching cap for a binary tree with length ratio >= 7/3
  CHECK(max_b == 2);
  CHECK(regular_tree_b_bound(2, 7.0 / 3.0) == doctest::Approx(4.0));
  CHECK(max_b <= regular_tree_b_bound(2, 7.0 / 3.0));
}

TEST_CASE("band masses add up across the decomposition") {
  for (const char* name : {"path04", "y_sym", "b2"}) {
    ts::Rooted r = ts::rooted(name);
    SigmaTable t = sigma_table(r.rt, r.u, r.v, PNorm::of(2.0));
    double total_mu = 0.0;
    for (const SigmaBand& band : t.bands) {
      double comp_mu = 0.0, comp_sig_p = 0.0;
      for (const SigmaComponent& c : band.components) {
        comp_mu += c.mu;
        comp_sig_p += c.sigma * c.sigma;
        CHECK(c.sigma ==
              doctest::Approx(std::sqrt(std::exp2(double(band.k)) * c.mu)).epsilon(1e-9));
      }
      CHECK(comp_mu == doctest::Approx(band.mu_total).epsilon(1e-9));
      CHECK(comp_sig_p == doctest::Approx(band.sigma * band.sigma).epsilon(1e-9));
      total_mu += band.mu_total;
    }
    double mass = mu(r.rt, r.v, PNorm::of(2.0), whole_tree(r.rt));
    CHECK(total_mu == doctest::Approx(mass).epsilon(1e-9));
    CHECK(t.dropped_mass_bound <= 1e-10 * std::max(1.0, t.sigma_p_mass));
  }
}

TEST_CASE("sequence norms are ordered the way the inequalities need") {
  ts::Rooted b2 = ts::rooted("b2");
  SigmaTable t = sigma_table(b2.rt, b2.u, b2.v, PNorm::of(2.0));
  for (double q : {1.0, 2.0}) {
    CHECK(t.weak_lq_components(q) <= t.lq_components(q) + 1e-9);
    // B >= 1 on every part carrying mass; zero-boundary slivers are O(1e-13)
    CHECK(t.lq_components(q) <= t.lq_weighted(q) + 1e-9);
  }
  CHECK(t.lq_bands(1.0) <= t.lq_components(1.0) + 1e-9);
  CHECK(t.lq_bands(2.0) >= t.lq_components(2.0) - 1e-9);  // equality up to dropped mass
}

TEST_CASE("band construction needs a finite exponent pair") {
  ts::Rooted r = ts::rooted("interval");
  CHECK_THROWS_AS(sigma_table(r.rt, r.u, r.v, PNorm::of(1.0)), unsupported_exponent);
  CHECK_THROWS_AS(sigma_table(r.rt, r.u, r.v,
                              PNorm::of(std::numeric_limits<double>::infinity())),
                  unsupported_exponent);
  StepWeight zero_u = StepWeight::constant(r.rt.tree(), 0.0);
  SigmaTable empty = sigma_table(r.rt, zero_u, r.v, PNorm::of(2.0));
  CHECK(empty.bands.empty());
}

TEST_CASE("spectrum, packing counts, and bands satisfy the asserted inequalities") {
  ts::Rooted p4 = ts::rooted("path04");
  Subtree whole = whole_tree(p4.rt);
  SigmaTable t = sigma_table(p4.rt, p4.u, p4.v, PNorm::of(2.0));
  double norm = op_norm_rich(p4.rt, p4.u, p4.v, whole, PNorm::of(2.0), ts::grid(128));
  CHECK(norm == doctest::Approx(8.0 / ts::kPi).epsilon(1e-6));
  std::vector<double> sv = approx_numbers_p2(p4.rt, p4.u, p4.v, whole, 12, ts::grid(128));
  AEvalParams ap = ts::eval_params(48, 64);
  std::vector<std::pair<double, int>> packing;
  for (double eps : {0.5, 0.3})
    packing.emplace_back(eps,
                         eps_packing(p4.rt, p4.u, p4.v, whole, PNorm::of(2.0), eps, ap).count);
  BoundCheckReport rep = lq_bound_checks(sv, t, norm, packing, PNorm::of(2.0));
  CHECK(rep.all_pass);
  bool saw_sup_row = false, saw_asserted = false;
  for (const BoundCheckRow& row : rep.rows) {
    if (row.name == "sup_sigma_le_norm") {
      saw_sup_row = true;
      CHECK(row.asserted);
      CHECK(row.lhs == doctest::Approx(t.sup_sigma()));
      CHECK(row.lhs <= row.rhs);
    }
    saw_asserted = saw_asserted || row.asserted;
    CHECK(std::isfinite(row.ratio));
  }
  CHECK(saw_sup_row);
  CHECK(saw_asserted);
}
