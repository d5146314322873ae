#include "hardytree/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "hardytree/asymptotics.hpp"
#include "hardytree/exact_cover.hpp"
#include "hardytree/fixtures.hpp"
#include "hardytree/hardy_operator.hpp"
#include "hardytree/partition.hpp"
#include "hardytree/random.hpp"
#include "hardytree/sigma.hpp"

namespace hardytree {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FixturePlan {
  Fixture fx;
  std::vector<double> eps_schedule;
  int spectrum_per_edge;
};

std::vector<FixturePlan> make_plans() {
  std::vector<FixturePlan> out;
  out.push_back({fixture_interval(), {0.2, 0.1, 0.05, 0.02, 0.01}, 1024});
  out.push_back({fixture_path04(), {0.5, 0.3, 0.18, 0.108}, 256});
  out.push_back({fixture_y_sym(), {0.4, 0.24, 0.144, 0.0864}, 256});
  out.push_back({fixture_binary3(), {0.5, 0.3, 0.18}, 128});
  out.push_back({fixture_b2(), {1.0, 0.6, 0.36}, 96});
  return out;
}

struct RootedProblem {
  RootedTree rt;
  StepWeight u;
  StepWeight v;
};

RootedProblem rooted(const Fixture& fx) {
  RootedTree rt = RootedTree::root_at(fx.tree, fx.root);
  return {rt, split_weight(fx.u, rt.split()), split_weight(fx.v, rt.split())};
}

GridParams grid(int per_edge, int min_nodes = 0) {
  GridParams g;
  g.per_edge = per_edge;
  g.min_nodes = min_nodes;
  return g;
}

AEvalParams eval_params(int per_edge, int min_nodes) {
  AEvalParams ap;
  ap.grid = grid(per_edge, min_nodes);
  return ap;
}

struct Ctx {
  std::uint64_t seed = 0;
  std::vector<FixturePlan> plans = make_plans();
  // per plan, per scanned eps: the greedy packing count, reused by the
  // level-band inequality checks
  std::vector<std::vector<std::pair<double, int>>> packing_counts;
};

CriterionResult c1_volterra_spectrum() {
  CriterionResult r{1, "volterra_spectrum", false, ""};
  auto t0 = std::chrono::steady_clock::now();
  RootedProblem pb = rooted(fixture_interval());
  std::vector<double> sv =
      approx_numbers_p2(pb.rt, pb.u, pb.v, whole_tree(pb.rt), 10, grid(2000));
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    double exact = 2.0 / ((2.0 * n - 1.0) * kPi);
    worst = std::max(worst, std::abs(sv[n - 1] - exact) / exact);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = worst <= 1e-3 && secs <= 60.0;
  r.detail = "worst_rel=" + num(worst);
  return r;
}

CriterionResult c2_asymptotic_law() {
  CriterionResult r{2, "asymptotic_law", false, ""};
  Fixture fx = fixture_binary3();
  RootedProblem pb = rooted(fx);
  const double target = fx.uv_integral / kPi;  // alpha_2 = 1/pi
  std::vector<double> sv =
      approx_numbers_p2(pb.rt, pb.u, pb.v, whole_tree(pb.rt), 60, grid(128));
  auto window_max = [&](int lo, int hi) {  // max deviation over n in (lo, hi]
    double m = 0.0;
    for (int n = lo + 1; n <= hi; ++n)
      m = std::max(m, std::abs(n * sv[n - 1] - target) / target);
    return m;
  };
  double m1 = window_max(9, 20), m2 = window_max(20, 40), m3 = window_max(40, 60);
  double dev60 = std::abs(60 * sv[59] - target) / target;
  r.pass = dev60 <= 0.10 && m3 <= 0.10 && m1 > m2 && m2 > m3;
  r.detail = "windows=" + num(m1) + "," + num(m2) + "," + num(m3) + " dev60=" + num(dev60);
  return r;
}

CriterionResult c3_partition_law() {
  CriterionResult r{3, "partition_law", false, ""};
  RootedProblem pb = rooted(fixture_interval());
  AEvalParams ap = eval_params(48, 64);
  bool counts_ok = true;
  std::string counts;
  double last_eps_n = 0.0;
  for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01}) {
    EpsPartitionResult part =
        eps_partition(pb.rt, pb.u, pb.v, whole_tree(pb.rt), PNorm{2.0}, eps, ap);
    int want = static_cast<int>(std::ceil(1.0 / (kPi * eps)));
    counts_ok = counts_ok && part.count == want;
    counts += (counts.empty() ? "" : ",") + std::to_string(part.count);
    last_eps_n = eps * part.count;
  }
  double rel = std::abs(last_eps_n - 1.0 / kPi) * kPi;
  r.pass = counts_ok && rel <= 0.05;
  r.detail = "N=" + counts + " epsN=" + num(last_eps_n) + " rel=" + num(rel);
  return r;
}

CriterionResult c4_sandwich(Ctx& ctx) {
  CriterionResult r{4, "sandwich", false, ""};
  AEvalParams ap = eval_params(48, 64);
  int total = 0, ok = 0;
  double worst_upper = 0.0;  // max a_{N+1}/eps over checks
  double worst_lower = 2.0;  // min a_M/eps over checks with M >= 1
  ctx.packing_counts.assign(ctx.plans.size(), {});
  for (std::size_t pi = 0; pi < ctx.plans.size(); ++pi) {
    const FixturePlan& plan = ctx.plans[pi];
    RootedProblem pb = rooted(plan.fx);
    for (double eps : plan.eps_schedule) {
      SandwichReport rep =
          sandwich_check(pb.rt, pb.u, pb.v, whole_tree(pb.rt), PNorm{2.0}, eps, ap,
                         grid(plan.spectrum_per_edge));
      ++total;
      if (rep.upper_ok && rep.lower_ok) ++ok;
      worst_upper = std::max(worst_upper, rep.a_n_plus_1 / eps);
      if (rep.m_lower >= 1) worst_lower = std::min(worst_lower, rep.a_m / eps);
      ctx.packing_counts[pi].emplace_back(eps, rep.m_lower);
    }
  }
  r.pass = ok == total;
  r.detail = "checks=" + std::to_string(ok) + "/" + std::to_string(total) +
             " max_aN1_over_eps=" + num(worst_upper) + " min_aM_over_eps=" + num(worst_lower);
  return r;
}

CriterionResult c5_cover_ratio(const Ctx& ctx) {
  CriterionResult r{5, "cover_ratio", false, ""};
  RandomStream rng(ctx.seed);
  RandomTreeSpec spec;
  AEvalParams ap = eval_params(24, 32);
  ExactCoverParams xp;
  xp.eval = ap;
  int ran = 0, violations = 0, max_n = 0;
  for (int i = 0; i < 50; ++i) {
    RandomInstance inst = random_instance(rng, spec);
    RootedTree rt = RootedTree::root_at(inst.tree, Location{0, 0.0});
    double whole = eval_a(rt, inst.u, inst.v, whole_tree(rt), PNorm{2.0}, ap, nullptr);
    double eps = whole * rng.uniform(0.25, 0.9);
    ExactCoverResult ex = exact_cover_count(rt, inst.u, inst.v, PNorm{2.0}, eps, xp);
    if (!ex.ran) continue;
    ++ran;
    max_n = std::max(max_n, ex.count);
    EpsPackingResult pk = eps_packing(rt, inst.u, inst.v, whole_tree(rt), PNorm{2.0}, eps, ap);
    if (3 * (pk.count + 1) < ex.count) ++violations;
  }
  r.pass = ran == 50 && violations == 0;
  r.detail = "ran=" + std::to_string(ran) + "/50 violations=" + std::to_string(violations) +
             " max_exact_N=" + std::to_string(max_n);
  return r;
}

CriterionResult c6_root_invariance(const Ctx& ctx) {
  CriterionResult r{6, "root_invariance", false, ""};
  RandomStream rng(ctx.seed + 1);
  double worst_pair = 0.0, worst_minroot = 0.0;
  for (const FixturePlan& plan : ctx.plans) {
    const Fixture& fx = plan.fx;
    double vals[2];
    for (int k = 0; k < 2; ++k) {
      EdgeId e = static_cast<EdgeId>(rng.uniform_int(0, fx.tree.edge_count() - 1));
      double off = fx.tree.edge(e).length * rng.uniform(0.1, 0.9);
      RootedTree rt = RootedTree::root_at(fx.tree, Location{e, off});
      StepWeight us = split_weight(fx.u, rt.split()), vs = split_weight(fx.v, rt.split());
      vals[k] = a_value_rich(rt, us, vs, whole_tree(rt), PNorm{2.0}, grid(64, 96));
    }
    worst_pair = std::max(worst_pair, std::abs(vals[0] - vals[1]) / vals[0]);

    RootedProblem pb = rooted(fx);
    double defl = a_value_rich(pb.rt, pb.u, pb.v, whole_tree(pb.rt), PNorm{2.0},
                               grid(48, 64));
    double mr = min_norm_over_roots_rich(pb.rt, pb.u, pb.v, whole_tree(pb.rt), PNorm{2.0},
                                         grid(48, 64));
    worst_minroot = std::max(worst_minroot, std::abs(defl - mr) / defl);
  }
  r.pass = worst_pair <= 1e-6 && worst_minroot <= 1e-4;
  r.detail = "worst_pair_rel=" + num(worst_pair) + " worst_minroot_rel=" + num(worst_minroot);
  return r;
}

CriterionResult c7_lipschitz(const Ctx& ctx) {
  CriterionResult r{7, "lipschitz", false, ""};
  RandomStream rng(ctx.seed + 2);
  const PNorm p2{2.0};
  int violations = 0;
  double worst_excess = -1.0;  // |dA| - bound, most adverse
  for (const FixturePlan& plan : ctx.plans) {
    RootedProblem pb = rooted(plan.fx);
    Subtree whole = whole_tree(pb.rt);
    double a_base = a_value_rich(pb.rt, pb.u, pb.v, whole, p2, grid(48, 64));
    double unorm = lp_norm(pb.rt, pb.u, p2, whole);
    double vnorm = lp_norm(pb.rt, pb.v, p2, whole);
    for (int i = 0; i < 200; ++i) {
      const bool u_side = i % 2 == 0;
      const StepWeight& base = u_side ? pb.u : pb.v;
      StepWeight pert = base, diff = base;
      for (auto& segs : pert.per_edge)
        for (auto& s : segs) s.value *= 1.0 + rng.uniform(-0.4, 0.4);
      for (std::size_t e = 0; e < diff.per_edge.size(); ++e)
        for (std::size_t s = 0; s < diff.per_edge[e].size(); ++s)
          diff.per_edge[e][s].value =
              std::abs(pert.per_edge[e][s].value - base.per_edge[e][s].value);
      double a_pert = u_side
                          ? a_value_rich(pb.rt, pert, pb.v, whole, p2, grid(48, 64))
                          : a_value_rich(pb.rt, pb.u, pert, whole, p2, grid(48, 64));
      double bound = u_side ? vnorm * lp_norm(pb.rt, diff, p2, whole)
                            : 2.0 * unorm * lp_norm(pb.rt, diff, p2, whole);
      double excess = std::abs(a_pert - a_base) - bound;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 1e-6) ++violations;
    }
  }
  r.pass = violations == 0;
  r.detail = "violations=" + std::to_string(violations) + "/1000 worst_excess=" +
             num(worst_excess);
  return r;
}

CriterionResult c8_boundedness() {
  CriterionResult r{8, "boundedness", false, ""};
  bool all = true;
  std::string parts;
  for (const Fixture& fx : {fixture_interval(), fixture_y_sym()}) {
    RootedProblem pb = rooted(fx);
    BoundednessReport rep = boundedness_check(pb.rt, pb.u, pb.v, PNorm{2.0}, 64,
                                              grid(96, 128));
    bool ok = rep.lower_ok && rep.ratio <= 4.0 * (1.0 + 1e-9);
    all = all && ok;
    parts += (parts.empty() ? "" : " ") + fx.name + "_ratio=" + num(rep.ratio);
  }
  r.pass = all;
  r.detail = parts;
  return r;
}

CriterionResult c9_level_bands(const Ctx& ctx) {
  CriterionResult r{9, "level_bands", false, ""};
  const PNorm p2{2.0};
  bool asserted_ok = true, finite_ok = true;
  double worst_sup_ratio = 0.0;
  for (std::size_t pi = 0; pi < ctx.plans.size(); ++pi) {
    const FixturePlan& plan = ctx.plans[pi];
    RootedProblem pb = rooted(plan.fx);
    Subtree whole = whole_tree(pb.rt);
    SigmaTable table = sigma_table(pb.rt, pb.u, pb.v, p2);
    double op = op_norm_rich(pb.rt, pb.u, pb.v, whole, p2, grid(48, 64));
    std::vector<double> an = approx_numbers_p2(pb.rt, pb.u, pb.v, whole, 40,
                                               grid(plan.spectrum_per_edge));
    BoundCheckReport rep = lq_bound_checks(an, table, op, ctx.packing_counts[pi], p2);
    for (const BoundCheckRow& row : rep.rows) {
      if (row.asserted && !row.pass) asserted_ok = false;
      if (!row.asserted && !std::isfinite(row.ratio)) finite_ok = false;
    }
    if (op > 0.0) worst_sup_ratio = std::max(worst_sup_ratio, table.sup_sigma() / op);
  }
  r.pass = asserted_ok && finite_ok;
  r.detail = std::string("asserted=") + (asserted_ok ? "ok" : "fail") + " ratios_finite=" +
             (finite_ok ? "ok" : "fail") + " max_sup_sigma_over_norm=" + num(worst_sup_ratio);
  return r;
}

CriterionResult c10_endpoint_bounds(const Ctx& ctx) {
  CriterionResult r{10, "endpoint_bounds", false, ""};
  RandomStream rng(ctx.seed + 3);
  MetricTree t(2, {Edge{0, 1, 1.0}});
  RootedTree rt = RootedTree::root_at(t, Location{0, 0.0});
  int ok = 0, targets = 0;
  for (int i = 0; i < 100; ++i) {
    const bool pinf_side = i % 2 == 0;
    double frac = rng.uniform(0.2, 0.8);
    StepWeight stepped;
    stepped.per_edge = {{WeightSegment{frac, rng.uniform(0.3, 1.8)},
                         WeightSegment{1.0 - frac, rng.uniform(0.3, 1.8)}}};
    StepWeight flat = StepWeight::constant(t, rng.uniform(0.3, 1.8));
    const StepWeight& u = pinf_side ? flat : stepped;
    const StepWeight& v = pinf_side ? stepped : flat;
    IntervalBoundsReport rep = p1_inf_bounds(rt, u, v, pinf_side);
    if (rep.all_pass) ++ok;
    if (rep.target > 0.0) ++targets;
  }
  r.pass = ok == 100 && targets == 100;
  r.detail = "all_rows_pass=" + std::to_string(ok) + "/100 targets_computed=" +
             std::to_string(targets);
  return r;
}

// Rebuilds a representative artifact twice from scratch (scan rows, level
// bands, a stretch of the random stream) and compares the bytes.
std::string determinism_probe(std::uint64_t seed) {
  std::ostringstream os;
  {
    RootedProblem pb = rooted(fixture_interval());
    AEvalParams ap = eval_params(48, 64);
    std::vector<ScanRow> rows = asymptotic_scan(pb.rt, pb.u, pb.v, whole_tree(pb.rt),
                                                PNorm{2.0}, {0.2, 0.1, 0.05}, ap, 1.0 / kPi);
    for (const ScanRow& row : rows)
      os << num(row.eps) << "," << row.n_upper << "," << row.m_lower << "," << num(row.eps_n)
         << "," << num(row.eps_m) << "," << num(row.target) << "\n";
  }
  {
    RootedProblem pb = rooted(fixture_path04());
    SigmaTable table = sigma_table(pb.rt, pb.u, pb.v, PNorm{2.0});
    for (const SigmaBand& band : table.bands) {
      os << band.k << ":" << num(band.sigma);
      for (const SigmaComponent& c : band.components)
        os << "," << num(c.mu) << "/" << c.boundary_count;
      os << "\n";
    }
  }
  {
    RandomStream rng(seed);
    RandomTreeSpec spec;
    for (int i = 0; i < 3; ++i) {
      RandomInstance inst = random_instance(rng, spec);
      os << inst.tree.edge_count() << ":" << num(inst.tree.total_length()) << ":"
         << num(inst.u.per_edge[0][0].value) << "\n";
    }
  }
  return os.str();
}

CriterionResult c11_determinism(const Ctx& ctx) {
  CriterionResult r{11, "determinism", false, ""};
  std::string first = determinism_probe(ctx.seed);
  std::string second = determinism_probe(ctx.seed);
  r.pass = !first.empty() && first == second;
  r.detail = "probe_bytes=" + std::to_string(first.size()) +
             (first == second ? " identical" : " DIFFER");
  return r;
}

}  // namespace

AcceptanceReport run_acceptance(std::uint64_t seed, std::ostream& log) {
  Ctx ctx;
  ctx.seed = seed;
  AcceptanceReport rep;
  auto push = [&](CriterionResult r) {
    log << "criterion " << r.index << " " << (r.pass ? "pass" : "FAIL") << " " << r.name
        << ": " << r.detail << "\n";
    log.flush();
    rep.criteria.push_back(std::move(r));
  };
  push(c1_volterra_spectrum());
  push(c2_asymptotic_law());
  push(c3_partition_law());
  push(c4_sandwich(ctx));
  push(c5_cover_ratio(ctx));
  push(c6_root_invariance(ctx));
  push(c7_lipschitz(ctx));
  push(c8_boundedness());
  push(c9_level_bands(ctx));
  push(c10_endpoint_bounds(ctx));
  push(c11_determinism(ctx));
  rep.all_pass = true;
  for (const CriterionResult& r : rep.criteria) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

Table acceptance_table(const AcceptanceReport& rep) {
  Table tb;
  tb.columns = {"criterion", "name", "pass", "detail"};
  for (const CriterionResult& r : rep.criteria)
    tb.rows.push_back({std::to_string(r.index), r.name, r.pass ? "pass" : "fail", r.detail});
  return tb;
}

}  // namespace hardytree
