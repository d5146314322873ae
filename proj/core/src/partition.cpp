#include "hardytree/partition.hpp"

#include <algorithm>
#include <cmath>

namespace hardytree {

double eval_a(const RootedTree& t, const StepWeight& u, const StepWeight& v, const Subtree& region,
              PNorm p, const AEvalParams& ap, bool* flag) {
  AValueResult r1 = a_value(t, u, v, region, p, ap.grid);
  double val = r1.value;
  bool fl = r1.flagged;
  const bool grid_based = !p.is_one() && !p.is_inf();
  if (grid_based && ap.richardson) {
    AValueResult r2 = a_value(t, u, v, region, p, ap.grid.doubled());
    val = (4.0 * r2.value - r1.value) / 3.0;
    fl = fl || r2.flagged;
  }
  if (flag) *flag = *flag || fl;
  return std::max(0.0, val);
}

namespace {

// Pending region during a greedy pass: anchored at the growth front, region =
// descendants minus cuts (the enclosing region's cuts are appended on
// realization). branches applies when the front sits on a vertex germ.
struct Pend {
  std::vector<EdgeId> branches;
  std::vector<Location> cuts;
  double a = 0.0;
};

struct GreedyCtx {
  const RootedTree& t;
  const StepWeight& u;
  const StepWeight& v;
  const Subtree& k;
  PNorm p;
  double eps;
  const AEvalParams& ap;
  bool packing;

  bool flag = false;
  int count = 0;
  std::vector<Subtree> emitted;

  Subtree realize(Location anchor, std::vector<EdgeId> branches,
                  std::vector<Location> cuts) const {
    Subtree s;
    s.anchor = anchor;
    s.branches = std::move(branches);
    s.cuts = std::move(cuts);
    s.cuts.insert(s.cuts.end(), k.cuts.begin(), k.cuts.end());
    return s;
  }

  double eval(const Subtree& s) { return eval_a(t, u, v, s, p, ap, &flag); }

  void take(Subtree s) {
    ++count;
    emitted.push_back(std::move(s));
  }

  // Ladder merge of the child pendings arriving at vertex vx. In partition
  // mode unions stay while A <= eps and overfull accumulators are emitted as
  // parts; in packing mode a union crossing eps is claimed. Returns the
  // continuing pending (empty branches = nothing pending).
  Pend merge_at_vertex(VertexId vx, std::vector<Pend> childs, bool final_stop) {
    Location germ = t.vertex_location(vx);
    std::stable_sort(childs.begin(), childs.end(), [](const Pend& x, const Pend& y) {
      if (x.a != y.a) return x.a < y.a;
      return x.branches < y.branches;
    });
    std::vector<EdgeId> taken_dirs;
    auto settle = [&](Pend& acc) {  // emit (partition) or claim (packing)
      taken_dirs.insert(taken_dirs.end(), acc.branches.begin(), acc.branches.end());
      take(realize(germ, acc.branches, acc.cuts));
    };

    Pend acc;
    for (Pend& c : childs) {
      if (acc.branches.empty()) {
        acc = std::move(c);
        continue;
      }
      Pend cand;
      cand.branches = acc.branches;
      cand.branches.insert(cand.branches.end(), c.branches.begin(), c.branches.end());
      std::sort(cand.branches.begin(), cand.branches.end());
      cand.cuts = acc.cuts;
      cand.cuts.insert(cand.cuts.end(), c.cuts.begin(), c.cuts.end());
      cand.a = eval(realize(germ, cand.branches, cand.cuts));
      if (packing) {
        if (cand.a > eps) {
          settle(cand);
          acc = Pend{};
        } else {
          acc = std::move(cand);
        }
      } else {
        if (cand.a <= eps) {
          acc = std::move(cand);
        } else {
          settle(acc);
          acc = std::move(c);
        }
      }
    }
    if (final_stop) {
      if (!packing && !acc.branches.empty()) settle(acc);
      return Pend{};
    }
    // cut off everything already settled so the region can keep growing up
    for (EdgeId f : taken_dirs) acc.cuts.push_back(t.at_down(f, 0.0));
    return acc;
  }

  // Growth along edge e over the kept span [lo, hi], entering with `base`
  // from the bottom vertex. Returns the pending that reaches the top, or
  // nothing when final_stop consumed it.
  Pend grow_edge(EdgeId e, double lo, double hi, Pend base) {
    const double tol = t.tree().edge(e).length * 1e-6;
    std::vector<Location> cuts = std::move(base.cuts);
    double t_cur = hi;
    // a front at the top endpoint is the directed germ into e, not the whole
    // fan below the vertex
    auto region_at = [&](double d) {
      Location loc = t.at_down(e, d);
      if (auto vx = t.tree().vertex_at(loc); vx && *vx == t.top_vertex(e))
        return realize(t.vertex_location(*vx), {e}, cuts);
      return realize(loc, {}, cuts);
    };
    for (int guard = 0;; ++guard) {
      if (guard > 100000)
        throw std::runtime_error("bisection failed to advance on edge " + std::to_string(e) +
                                 " span [" + std::to_string(lo) + ", " + std::to_string(t_cur) +
                                 "]");
      double a_lo = eval(region_at(lo));
      if (a_lo <= eps) return Pend{{}, std::move(cuts), a_lo};
      double a = lo, b = t_cur;
      while (b - a > tol) {
        double m = 0.5 * (a + b);
        if (eval(region_at(m)) <= eps)
          b = m;
        else
          a = m;
      }
      if (packing) {
        take(region_at(a));  // strict side: A > eps up the whole bisection
        cuts = {t.at_down(e, a)};
        t_cur = a;
      } else {
        take(region_at(b));
        cuts = {t.at_down(e, b)};
        t_cur = b;
      }
    }
  }
};

GreedyCtx run_greedy(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                     const Subtree& k, PNorm p, double eps, const AEvalParams& ap, bool packing) {
  if (!(eps > 0.0)) throw std::invalid_argument("threshold must be positive");
  GreedyCtx ctx{t, u, v, k, p, eps, ap, packing, false, 0, {}};

  auto anchor_vertex = t.tree().vertex_at(k.anchor);
  Location ca = t.canonical(k.anchor);

  std::vector<std::optional<Pend>> ready(t.tree().edge_count());
  const auto& pre = t.preorder_edges();
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    EdgeId e = *it;
    auto sp = kept_span(t, k, e);
    if (!sp || sp->second - sp->first <= loc_snap_tol) continue;
    const auto [lo, hi] = *sp;

    VertexId bv = t.bottom_vertex(e);
    std::vector<Pend> childs;
    for (EdgeId f : t.child_edges(bv))
      if (ready[f]) {
        childs.push_back(std::move(*ready[f]));
        ready[f].reset();
      }
    Pend base = ctx.merge_at_vertex(bv, std::move(childs), false);
    base.branches.clear();

    Pend topped = ctx.grow_edge(e, lo, hi, std::move(base));
    const bool is_anchor_edge = !anchor_vertex && ca.edge == e;
    if (is_anchor_edge) {
      if (!packing) ctx.take(ctx.realize(k.anchor, k.branches, std::move(topped.cuts)));
    } else {
      topped.branches = {e};
      ready[e] = std::move(topped);
    }
  }

  if (anchor_vertex) {
    std::vector<Pend> childs;
    for (EdgeId f : t.child_edges(*anchor_vertex))
      if (ready[f]) {
        childs.push_back(std::move(*ready[f]));
        ready[f].reset();
      }
    ctx.merge_at_vertex(*anchor_vertex, std::move(childs), true);
  }
  return ctx;
}

}  // namespace

EpsPartitionResult eps_partition(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                 const Subtree& k, PNorm p, double eps, const AEvalParams& ap) {
  GreedyCtx ctx = run_greedy(t, u, v, k, p, eps, ap, false);
  EpsPartitionResult r;
  r.count = ctx.count;
  r.partition.parent = k;
  r.partition.parts = std::move(ctx.emitted);
  r.estimate = ctx.flag || p.is_one() || p.is_inf();
  return r;
}

EpsPackingResult eps_packing(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                             const Subtree& k, PNorm p, double eps, const AEvalParams& ap) {
  GreedyCtx ctx = run_greedy(t, u, v, k, p, eps, ap, true);
  EpsPackingResult r;
  r.count = ctx.count;
  r.regions = std::move(ctx.emitted);
  r.estimate = ctx.flag || p.is_one() || p.is_inf();
  return r;
}

SandwichReport sandwich_check(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                              const Subtree& k, PNorm p, double eps, const AEvalParams& ap,
                              const GridParams& spectrum_grid, double upper_slack,
                              double lower_slack) {
  if (p.is_one() || p.is_inf() || p.p != 2.0)
    throw unsupported_exponent("the two-sided spectral check runs at p=2");
  SandwichReport rep;
  rep.eps = eps;
  rep.n_upper = eps_partition(t, u, v, k, p, eps, ap).count;
  rep.m_lower = eps_packing(t, u, v, k, p, eps, ap).count;
  std::vector<double> sv =
      approx_numbers_p2(t, u, v, k, std::max(rep.n_upper + 1, rep.m_lower), spectrum_grid);
  rep.a_n_plus_1 = sv[rep.n_upper];
  rep.a_m = rep.m_lower > 0 ? sv[rep.m_lower - 1] : 0.0;
  rep.upper_ok = rep.a_n_plus_1 <= eps * (1.0 + upper_slack);
  rep.lower_ok = rep.m_lower == 0 || rep.a_m >= eps * (1.0 - lower_slack);
  return rep;
}

std::vector<ScanRow> asymptotic_scan(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                     const Subtree& k, PNorm p, const std::vector<double>& schedule,
                                     const AEvalParams& ap, double target) {
  std::vector<ScanRow> rows;
  rows.reserve(schedule.size());
  for (double eps : schedule) {
    ScanRow row;
    row.eps = eps;
    row.n_upper = eps_partition(t, u, v, k, p, eps, ap).count;
    row.m_lower = eps_packing(t, u, v, k, p, eps, ap).count;
    row.eps_n = eps * row.n_upper;
    row.eps_m = eps * row.m_lower;
    row.target = target;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hardytree
