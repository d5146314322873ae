#include "hardytree/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace hardytree {

namespace {

std::vector<double> merged_breaks(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                  const GridParams& prm, EdgeId e, double lo, double hi) {
  std::vector<double> bks{lo, hi};
  auto add_weight = [&](const StepWeight& w) {
    double cursor = 0.0;
    const double len = t.tree().edge(e).length;
    bool top_is_from = t.top_vertex(e) == t.tree().edge(e).from;
    for (const WeightSegment& s : w.per_edge[e]) {
      cursor += s.len;
      double d = top_is_from ? cursor : len - cursor;
      if (d > lo + loc_snap_tol && d < hi - loc_snap_tol) bks.push_back(d);
    }
  };
  add_weight(u);
  add_weight(v);
  for (const auto& [ee, d] : prm.extra_breaks)
    if (ee == e && d > lo + loc_snap_tol && d < hi - loc_snap_tol) bks.push_back(d);
  std::sort(bks.begin(), bks.end());
  bks.erase(std::unique(bks.begin(), bks.end(),
                        [](double a, double b) { return std::abs(a - b) <= loc_snap_tol; }),
            bks.end());
  return bks;
}

}  // namespace

QuadGrid build_grid(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                    const Subtree& k, const GridParams& prm) {
  QuadGrid g;
  g.region = k;
  g.edge_nodes.resize(t.tree().edge_count());

  struct EdgePlan {
    EdgeId e;
    std::vector<double> breaks;  // down coords, ascending, >= 2 entries
    std::vector<int> cells;      // per piece
  };
  std::vector<EdgePlan> plans;
  long total = 0;
  for (EdgeId e : t.preorder_edges()) {
    auto sp = kept_span(t, k, e);
    if (!sp || sp->second - sp->first <= loc_snap_tol) continue;
    EdgePlan plan;
    plan.e = e;
    plan.breaks = merged_breaks(t, u, v, prm, e, sp->first, sp->second);
    const double h = t.tree().edge(e).length / std::max(1, prm.per_edge);
    for (size_t i = 0; i + 1 < plan.breaks.size(); ++i) {
      double len = plan.breaks[i + 1] - plan.breaks[i];
      int m = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
      plan.cells.push_back(m);
      total += m;
    }
    plans.push_back(std::move(plan));
  }
  if (prm.min_nodes > 0 && total > 0 && total < prm.min_nodes) {
    long scale = (prm.min_nodes + total - 1) / total;
    for (auto& plan : plans)
      for (int& m : plan.cells) m *= static_cast<int>(scale);
  }

  // anchor bookkeeping for chain starts
  auto va = t.tree().vertex_at(k.anchor);
  Location ca = t.canonical(k.anchor);

  // last node index fed into each edge's chain (or the inherited value when
  // the edge contributes no cells)
  std::vector<int> last_end(t.tree().edge_count(), -1);
  std::vector<char> processed(t.tree().edge_count(), 0);

  for (auto& plan : plans) {
    EdgeId e = plan.e;
    int parent;
    if (!va && ca.edge == e) {
      parent = -1;  // anchor sits on this edge
    } else if (va && t.top_vertex(e) == *va) {
      parent = -1;  // chain departs the anchor vertex
    } else {
      EdgeId pe = t.parent_edge(t.top_vertex(e));
      parent = (pe >= 0 && processed[pe]) ? last_end[pe] : -1;
    }
    for (size_t i = 0; i + 1 < plan.breaks.size(); ++i) {
      double a = plan.breaks[i], b = plan.breaks[i + 1];
      int m = plan.cells[i];
      double step = (b - a) / m;
      for (int c = 0; c < m; ++c) {
        double mid = a + (c + 0.5) * step;
        Location loc = t.at_down(e, mid);
        GridNode node;
        node.loc = loc;
        node.q = step;
        node.u = value_at(u, e, loc.offset);
        node.v = value_at(v, e, loc.offset);
        node.parent = parent;
        parent = static_cast<int>(g.nodes.size());
        g.edge_nodes[e].push_back(parent);
        g.nodes.push_back(node);
      }
    }
    last_end[e] = parent;
    processed[e] = 1;
  }
  return g;
}

std::vector<int> reroot_parents(const RootedTree& t, const QuadGrid& g, Location x) {
  const int n = g.size();
  std::vector<std::vector<int>> adj(n);
  std::vector<std::pair<int, int>> links;
  std::vector<int> heads;
  for (int i = 0; i < n; ++i) {
    if (g.nodes[i].parent >= 0)
      links.emplace_back(g.nodes[i].parent, i);
    else
      heads.push_back(i);
  }
  // Chains starting at the anchor have no native link between them; paths
  // re-rooted into one branch must still cross the anchor into the others, so
  // the heads are linked pairwise (subject to the same cut test as any link).
  for (size_t a = 0; a < heads.size(); ++a)
    for (size_t c = a + 1; c < heads.size(); ++c) links.emplace_back(heads[a], heads[c]);

  Location cx = t.canonical(x);
  std::vector<char> cut(links.size(), 0);
  std::vector<int> seeds;
  for (size_t l = 0; l < links.size(); ++l) {
    auto [i, j] = links[l];
    double dij = t.distance(g.nodes[i].loc, g.nodes[j].loc);
    double dx = t.distance(g.nodes[i].loc, cx) + t.distance(cx, g.nodes[j].loc);
    if (dx <= dij + loc_snap_tol) {  // x lies on the link's path
      cut[l] = 1;
      seeds.push_back(i);
      seeds.push_back(j);
    }
  }
  for (size_t l = 0; l < links.size(); ++l) {
    if (cut[l]) continue;
    adj[links[l].first].push_back(links[l].second);
    adj[links[l].second].push_back(links[l].first);
  }
  if (seeds.empty() && n > 0) {
    int best = 0;
    double bd = t.distance(g.nodes[0].loc, cx);
    for (int i = 1; i < n; ++i) {
      double d = t.distance(g.nodes[i].loc, cx);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    seeds.push_back(best);
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<int> parent(n, -2);
  std::queue<int> q;
  for (int s : seeds) {
    parent[s] = -1;
    q.push(s);
  }
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    for (int j : adj[i])
      if (parent[j] == -2) {
        parent[j] = i;
        q.push(j);
      }
  }
  for (int i = 0; i < n; ++i)
    if (parent[i] == -2) parent[i] = -1;  // disconnected fragment: own chain
  return parent;
}

double grid_norm(const QuadGrid& g, const std::vector<double>& f, PNorm p) {
  if (p.is_inf()) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
  }
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) acc += g.nodes[i].q * std::pow(std::abs(f[i]), p.p);
  return std::pow(acc, 1.0 / p.p);
}

}  // namespace hardytree
