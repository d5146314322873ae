#include "hardytree/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hardytree/hardy_operator.hpp"
#include "hardytree/linalg.hpp"

namespace hardytree {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<WeightSegment> powered(const std::vector<WeightSegment>& segs, double q) {
  std::vector<WeightSegment> out = segs;
  for (auto& s : out) s.value = std::pow(std::abs(s.value), q);
  return out;
}

double total(const std::vector<WeightSegment>& segs) {
  double acc = 0.0;
  for (const auto& s : segs) acc += s.value * s.len;
  return acc;
}

double prefix_mass(const std::vector<WeightSegment>& segs, double d) {
  double acc = 0.0;
  double at = 0.0;
  for (const auto& s : segs) {
    double b = std::min(d, at + s.len);
    if (b > at) acc += s.value * (b - at);
    at += s.len;
  }
  return acc;
}

double prefix_max(const std::vector<WeightSegment>& segs, double d) {
  double best = 0.0;
  double at = 0.0;
  for (const auto& s : segs) {
    if (at >= d) break;
    best = std::max(best, s.value);
    at += s.len;
  }
  return best;
}

double suffix_max(const std::vector<WeightSegment>& segs, double d) {
  double best = 0.0;
  double at = 0.0;
  for (const auto& s : segs) {
    if (at + s.len > d) best = std::max(best, s.value);
    at += s.len;
  }
  return best;
}

std::vector<EdgeId> root_chain(const RootedTree& t, Location x) {
  std::vector<EdgeId> chain;
  EdgeId e = t.canonical(x).edge;
  while (e >= 0) {
    chain.push_back(e);
    e = t.parent_edge(t.top_vertex(e));
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

}  // namespace

AlphaP alpha_p(PNorm p, const GridParams& prm) {
  AlphaP out;
  if (p.p == 2.0) {
    out.value = 1.0 / kPi;
    out.analytic = true;
    return out;
  }
  if (p.is_one() || p.is_inf()) {
    out.value = 0.5;
    out.analytic = true;
    return out;
  }
  MetricTree unit(2, {Edge{0, 1, 1.0}});
  StepWeight one = StepWeight::constant(unit, 1.0);
  RootedTree rt = RootedTree::root_at(unit, Location{0, 0.0});
  AValueResult base = a_value(rt, one, one, whole_tree(rt), p, prm);
  AValueResult fine = a_value(rt, one, one, whole_tree(rt), p, prm.doubled());
  out.value = (4.0 * fine.value - base.value) / 3.0;
  out.error = std::abs(fine.value - base.value) / 3.0;
  return out;
}

double path_dual_norm(const RootedTree& t, const StepWeight& u, PNorm p, Location x) {
  const double pc = p.conjugate();
  Location a = t.vertex_location(t.root());
  double acc = 0.0;
  double mx = 0.0;
  for (const auto& [e, o1, o2] : t.path(a, x)) {
    double lo = std::min(o1, o2), hi = std::max(o1, o2);
    double at = 0.0;
    for (const auto& s : u.per_edge.at(e)) {
      double sa = std::max(lo, at), sb = std::min(hi, at + s.len);
      if (sb > sa) {
        if (std::isinf(pc))
          mx = std::max(mx, std::abs(s.value));
        else
          acc += std::pow(std::abs(s.value), pc) * (sb - sa);
      }
      at += s.len;
    }
  }
  if (std::isinf(pc)) return mx;
  return std::pow(acc, 1.0 / pc);
}

Location meet_point(const RootedTree& t, Location x, Location y) {
  Location cx = t.canonical(x), cy = t.canonical(y);
  std::vector<EdgeId> ax = root_chain(t, cx), ay = root_chain(t, cy);
  size_t l = 0;
  while (l < ax.size() && l < ay.size() && ax[l] == ay[l]) ++l;
  if (l == ax.size() && l == ay.size())
    return t.down(cx) <= t.down(cy) ? cx : cy;
  if (l == ax.size()) return cx;  // y's chain passes through x's edge
  if (l == ay.size()) return cy;
  if (l == 0) return t.vertex_location(t.root());
  return t.vertex_location(t.bottom_vertex(ax[l - 1]));
}

double norm_lower_bound(const RootedTree& t, const StepWeight& u, const StepWeight& v, PNorm p) {
  const double pp = p.p;
  const double pc = p.conjugate();
  const int ne = t.tree().edge_count();

  std::vector<std::vector<WeightSegment>> us(ne), vs(ne);
  std::vector<double> u_top(ne, 0.0);     // cumulative u^{pc} (or running max)
  std::vector<double> v_below(ne, 0.0);   // subtree v^{pp} mass (or max) below the edge bottom
  for (EdgeId e : t.preorder_edges()) {
    us[e] = powered(down_segments(t, u, e), std::isinf(pc) ? 1.0 : pc);
    vs[e] = powered(down_segments(t, v, e), p.is_inf() ? 1.0 : pp);
    EdgeId pe = t.parent_edge(t.top_vertex(e));
    if (std::isinf(pc))
      u_top[e] = pe >= 0 ? std::max(u_top[pe], suffix_max(us[pe], 0.0)) : 0.0;
    else
      u_top[e] = pe >= 0 ? u_top[pe] + total(us[pe]) : 0.0;
  }
  const auto& pre = t.preorder_edges();
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    EdgeId e = *it;
    double acc = p.is_inf() ? 0.0 : 0.0;
    for (EdgeId f : t.child_edges(t.bottom_vertex(e))) {
      double sub = p.is_inf() ? std::max(v_below[f], suffix_max(vs[f], 0.0))
                              : v_below[f] + total(vs[f]);
      acc = p.is_inf() ? std::max(acc, sub) : acc + sub;
    }
    v_below[e] = acc;
  }

  double best = 0.0;
  for (EdgeId e : t.preorder_edges()) {
    double elen = t.tree().edge(e).length;
    std::set<double> ds{0.0, elen};
    double at = 0.0;
    for (const auto& s : us[e]) ds.insert(at += s.len);
    at = 0.0;
    for (const auto& s : vs[e]) ds.insert(at += s.len);
    for (int j = 1; j < 128; ++j) ds.insert(elen * j / 128.0);
    for (double d : ds) {
      if (d < 0.0 || d > elen) continue;
      double f1;
      if (std::isinf(pc))
        f1 = std::max(u_top[e], prefix_max(us[e], d));
      else {
        double val = u_top[e] + prefix_mass(us[e], d);
        f1 = std::pow(val, 1.0 / pc);
      }
      double f2;
      if (p.is_inf())
        f2 = std::max(v_below[e], suffix_max(vs[e], d));
      else {
        double val = v_below[e] + (total(vs[e]) - prefix_mass(vs[e], d));
        f2 = std::pow(val, 1.0 / pp);
      }
      best = std::max(best, f1 * f2);
    }
  }
  return best;
}

std::vector<Location> u_level_crossings(const RootedTree& t, const StepWeight& u, PNorm p,
                                        double level) {
  const double pc = p.conjugate();
  const int ne = t.tree().edge_count();
  std::vector<std::vector<WeightSegment>> us(ne);
  std::vector<double> u_top(ne, 0.0), u_bot(ne, 0.0);
  for (EdgeId e : t.preorder_edges()) {
    us[e] = powered(down_segments(t, u, e), std::isinf(pc) ? 1.0 : pc);
    EdgeId pe = t.parent_edge(t.top_vertex(e));
    if (std::isinf(pc)) {
      u_top[e] = pe >= 0 ? u_bot[pe] : 0.0;
      u_bot[e] = std::max(u_top[e], suffix_max(us[e], 0.0));
    } else {
      u_top[e] = pe >= 0 ? u_bot[pe] : 0.0;
      u_bot[e] = u_top[e] + total(us[e]);
    }
  }
  std::vector<Location> out;
  for (EdgeId e : t.preorder_edges()) {
    if (!(u_top[e] < level && u_bot[e] >= level)) continue;
    double d = 0.0;
    if (std::isinf(pc)) {
      for (const auto& s : us[e]) {
        if (std::max(u_top[e], s.value) >= level) break;
        d += s.len;
      }
    } else {
      double acc = u_top[e];
      for (const auto& s : us[e]) {
        double gain = s.value * s.len;
        if (acc + gain >= level) {
          d += s.value > 0.0 ? (level - acc) / s.value : 0.0;
          break;
        }
        acc += gain;
        d += s.len;
      }
    }
    out.push_back(t.at_down(e, d));
  }
  return out;
}

double alpha_K(const RootedTree& t, const StepWeight& u, PNorm p,
               const std::vector<Location>& boundary, const GridParams& prm) {
  if (boundary.empty()) throw std::domain_error("alpha_K: empty boundary family");
  std::vector<double> uj(boundary.size());
  for (size_t j = 0; j < boundary.size(); ++j) {
    uj[j] = path_dual_norm(t, u, p, boundary[j]);
    if (!(uj[j] > 0.0))
      throw infeasible_constraint("alpha_K: u vanishes along a constraint path");
  }
  if (boundary.size() == 1) return 1.0 / uj[0];

  const int J = static_cast<int>(boundary.size());
  if (p.p == 2.0) {
    // Gram of the path masses: G_ij = int_{common path} u^2.
    std::vector<double> g(size_t(J) * J, 0.0);
    for (int i = 0; i < J; ++i)
      for (int j = i; j < J; ++j) {
        Location m = meet_point(t, boundary[i], boundary[j]);
        double val = i == j ? uj[i] * uj[i] : std::pow(path_dual_norm(t, u, p, m), 2.0);
        g[size_t(j) * J + i] = g[size_t(i) * J + j] = val;
      }
    for (int i = 0; i < J; ++i) g[size_t(i) * J + i] += 1e-14 * uj[i] * uj[i];
    std::vector<double> lam = solve_spd(g, std::vector<double>(J, 1.0));
    double s = 0.0;
    for (double l : lam) s += l;
    return std::sqrt(std::max(0.0, s));
  }

  // Projected subgradient on the union of constraint paths.
  StepWeight vdummy = StepWeight::constant(t.tree(), 1.0);
  QuadGrid grid = build_grid(t, u, vdummy, whole_tree(t), prm);
  std::vector<int> sel;
  std::vector<std::vector<double>> rows;  // J x n weights q_i |u_i|
  for (size_t i = 0; i < grid.nodes.size(); ++i) {
    bool used = false;
    for (const auto& b : boundary)
      if (t.precedes(grid.nodes[i].loc, b)) {
        used = true;
        break;
      }
    if (used) sel.push_back(static_cast<int>(i));
  }
  const int n = static_cast<int>(sel.size());
  if (n == 0) throw infeasible_constraint("alpha_K: no quadrature support on constraint paths");
  rows.assign(J, std::vector<double>(n, 0.0));
  for (int j = 0; j < J; ++j)
    for (int i = 0; i < n; ++i) {
      const GridNode& nd = grid.nodes[sel[i]];
      if (t.precedes(nd.loc, boundary[j])) rows[j][i] = nd.q * std::abs(nd.u);
    }
  std::vector<double> cc(size_t(J) * J, 0.0);
  for (int a = 0; a < J; ++a)
    for (int b = a; b < J; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rows[a][i] * rows[b][i];
      cc[size_t(b) * J + a] = cc[size_t(a) * J + b] = s;
    }
  for (int a = 0; a < J; ++a) cc[size_t(a) * J + a] *= 1.0 + 1e-12;

  auto project = [&](std::vector<double>& x) {
    std::vector<double> res(J, 0.0);
    for (int j = 0; j < J; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rows[j][i] * x[i];
      res[j] = s - 1.0;
    }
    std::vector<double> lam = solve_spd(cc, res);
    for (int i = 0; i < n; ++i) {
      double corr = 0.0;
      for (int j = 0; j < J; ++j) corr += rows[j][i] * lam[j];
      x[i] -= corr;
    }
  };
  auto value_of = [&](const std::vector<double>& x) {
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rows[j][i] * std::abs(x[i]);
      worst = std::min(worst, s);
    }
    if (!(worst > 0.0)) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += grid.nodes[sel[i]].q * std::pow(std::abs(x[i]), p.p);
    return std::pow(acc, 1.0 / p.p) / worst;
  };

  std::vector<double> x(n, 0.0);
  for (int i = 0; i < n; ++i) x[i] = std::abs(grid.nodes[sel[i]].u);
  project(x);
  double best = value_of(x);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(x[i]));
  if (scale <= 0.0) scale = 1.0;
  for (int it = 1; it <= 10000; ++it) {
    double nrm = 0.0;
    for (int i = 0; i < n; ++i)
      nrm += grid.nodes[sel[i]].q * std::pow(std::abs(x[i]), p.p);
    nrm = std::pow(nrm, 1.0 / p.p);
    if (!(nrm > 0.0)) break;
    std::vector<double> g(n, 0.0);
    double gn = 0.0;
    for (int i = 0; i < n; ++i) {
      double xi = std::abs(x[i]);
      g[i] = std::pow(nrm, 1.0 - p.p) * grid.nodes[sel[i]].q * std::pow(xi, p.p - 1.0) *
             (x[i] < 0.0 ? -1.0 : 1.0);
      gn += g[i] * g[i];
    }
    gn = std::sqrt(gn);
    if (!(gn > 0.0)) break;
    double eta = 0.05 * scale / (gn * std::sqrt(double(it)));
    for (int i = 0; i < n; ++i) x[i] -= eta * g[i];
    for (int round = 0; round < 3; ++round) {
      project(x);
      for (int i = 0; i < n; ++i) x[i] = std::max(0.0, x[i]);
    }
    project(x);
    best = std::min(best, value_of(x));
  }
  return best;
}

namespace {

struct TailEval {
  const RootedTree* t = nullptr;
  const StepWeight* v = nullptr;
  PNorm p{2.0};
  std::vector<std::vector<WeightSegment>> vsegs;
  std::vector<double> v_below;

  void init(const RootedTree& tree, const StepWeight& w, PNorm pn) {
    t = &tree;
    v = &w;
    p = pn;
    const int ne = tree.tree().edge_count();
    vsegs.resize(ne);
    v_below.assign(ne, 0.0);
    for (EdgeId e : tree.preorder_edges())
      vsegs[e] = powered(down_segments(tree, w, e), pn.is_inf() ? 1.0 : pn.p);
    const auto& pre = tree.preorder_edges();
    for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
      EdgeId e = *it;
      double acc = 0.0;
      for (EdgeId f : tree.child_edges(tree.bottom_vertex(e))) {
        double sub = p.is_inf() ? std::max(v_below[f], suffix_max(vsegs[f], 0.0))
                                : v_below[f] + total(vsegs[f]);
        acc = p.is_inf() ? std::max(acc, sub) : acc + sub;
      }
      v_below[e] = acc;
    }
  }

  // ||v||_p over the union of strict-descendant sets of the given points.
  double outside(const std::vector<Location>& pts) const {
    double acc = 0.0;
    for (const auto& x : pts) {
      Location c = t->canonical(x);
      double d = t->down(c);
      EdgeId e = c.edge;
      double sub = p.is_inf()
                       ? std::max(v_below[e], suffix_max(vsegs[e], d))
                       : v_below[e] + (total(vsegs[e]) - prefix_mass(vsegs[e], d));
      acc = p.is_inf() ? std::max(acc, sub) : acc + sub;
    }
    if (p.is_inf()) return acc;
    return std::pow(acc, 1.0 / p.p);
  }
};

}  // namespace

BoundednessReport boundedness_check(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                    PNorm p, int levels, const GridParams& prm) {
  if (levels < 1) throw std::domain_error("boundedness_check: need at least one level");
  BoundednessReport rep;

  const double pc = p.conjugate();
  double u_max = 0.0;
  {
    std::vector<double> u_bot(t.tree().edge_count(), 0.0);
    for (EdgeId e : t.preorder_edges()) {
      auto us = powered(down_segments(t, u, e), std::isinf(pc) ? 1.0 : pc);
      EdgeId pe = t.parent_edge(t.top_vertex(e));
      double base = pe >= 0 ? u_bot[pe] : 0.0;
      u_bot[e] = std::isinf(pc) ? std::max(base, suffix_max(us, 0.0)) : base + total(us);
      u_max = std::max(u_max, u_bot[e]);
    }
  }

  TailEval tail;
  tail.init(t, v, p);

  auto eval_level = [&](double c) -> BoundednessRow {
    BoundednessRow row;
    row.level = c;
    std::vector<Location> bnd = u_level_crossings(t, u, p, c);
    if (bnd.empty()) return row;
    row.tail = tail.outside(bnd);
    row.alpha = alpha_K(t, u, p, bnd, prm);
    row.value = row.alpha > 0.0 ? row.tail / row.alpha : 0.0;
    return row;
  };

  const Subtree whole = whole_tree(t);
  if (u_max > 0.0) {
    double best_level = 0.0;
    for (int j = 1; j <= levels; ++j) {
      double c = u_max * double(j) / double(levels + 1);
      BoundednessRow row = eval_level(c);
      rep.rows.push_back(row);
      if (row.value > rep.a_hat) {
        rep.a_hat = row.value;
        best_level = c;
      }
    }
    if (rep.a_hat > 0.0) {
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double delta = u_max / double(levels + 1);
      double lo = std::max(best_level - delta, u_max * 1e-9);
      double hi = std::min(best_level + delta, u_max * (1.0 - 1e-12));
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = eval_level(x1).value, f2 = eval_level(x2).value;
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = eval_level(x2).value;
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = eval_level(x1).value;
        }
      }
      BoundednessRow polished = eval_level(f1 > f2 ? x1 : x2);
      if (polished.value > rep.a_hat) rep.a_hat = polished.value;
      rep.rows.push_back(polished);
    }
  }
  double op = op_norm_rich(t, u, v, whole, p, prm);
  rep.op_norm = op;
  rep.ratio = rep.a_hat > 0.0 ? op / rep.a_hat : (op > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  rep.lower_ok = rep.a_hat <= op * (1.0 + 1e-6) + 1e-12;
  return rep;
}

IntervalBoundsReport p1_inf_bounds(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                   bool pinf_side, const std::vector<double>& alphas) {
  for (int vx = 0; vx < t.tree().vertex_count(); ++vx)
    if (t.child_edges(vx).size() > 1)
      throw std::domain_error("p1_inf_bounds: interval statements need a non-branching tree");

  IntervalBoundsReport rep;
  const Subtree whole = whole_tree(t);
  rep.target = product_integral(t, u, v, whole);
  const double len = t.tree().total_length();

  const StepWeight& stepped = pinf_side ? v : u;
  const StepWeight& flat = pinf_side ? u : v;
  double gamma = -1.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e)
    for (const auto& s : flat.per_edge.at(e)) {
      if (gamma < 0.0) gamma = s.value;
      if (std::abs(s.value - gamma) > 1e-12 * std::max(1.0, gamma))
        throw std::domain_error("p1_inf_bounds: the non-stepped weight must be constant");
    }
  if (gamma < 0.0) gamma = 0.0;

  std::vector<WeightSegment> path_segs;
  double delta = 0.0;
  double step_mass = 0.0;
  for (EdgeId e : t.preorder_edges())
    for (const auto& s : down_segments(t, stepped, e)) {
      path_segs.push_back(s);
      delta = std::max(delta, s.value);
      step_mass += s.value * s.len;
    }
  double rearr = rearrangement_sup_t(path_segs);

  PNorm p = pinf_side ? PNorm::of(std::numeric_limits<double>::infinity()) : PNorm::of(1.0);
  double a_num = a_value(t, u, v, whole, p, GridParams{}).value;
  double a_flat = 0.5 * gamma * delta * len;
  const double lower_c = pinf_side ? 0.5 : 0.25;

  auto push = [&rep](std::string name, double alpha, double lhs, double rhs) {
    IntervalBoundsRow row;
    row.name = std::move(name);
    row.alpha = alpha;
    row.lhs = lhs;
    row.rhs = rhs;
    row.pass = lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  };

  push("flat_weight_dominates", 0.0, a_num, a_flat);
  push("rearrangement_minorizes", 0.0, lower_c * gamma * rearr, a_num);
  double defect = gamma * (delta * len - step_mass);  // int |gamma| (delta - w_s)
  for (double al : alphas)
    push("gap_bound", al, a_flat - a_num, 0.5 * al * defect + gamma * delta * len / (2.0 * al));
  return rep;
}

double regular_tree_b_bound(int b, double mu1) {
  if (b < 1 || mu1 <= 1.0) throw std::domain_error("regular_tree_b_bound: need b >= 1, mu1 > 1");
  return std::pow(double(b), std::ceil(std::log(2.0) / std::log(mu1) + 1.0));
}

}  // namespace hardytree
