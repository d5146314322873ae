#include "hardytree/exact_cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardytree {

namespace {

// Open region at the sweep frontier: the kept part is everything at or below
// the frontier minus the strict descendants of the cuts. Cuts are kept as a
// minimal antichain.
struct DPState {
  int count = 0;
  std::vector<Location> cuts;
};

struct Sweep {
  const RootedTree& t;
  const StepWeight& u;
  const StepWeight& v;
  PNorm p;
  double eps;
  const ExactCoverParams& prm;
  bool overflow = false;

  double a_of(const Subtree& region) {
    return eval_a(t, u, v, region, p, prm.eval, nullptr);
  }

  // Exclusion zone of cut z contains that of cut y. Cuts are compared by
  // edge, not by metric point: germ cuts at the same vertex on different
  // child edges exclude different branches and must both survive.
  bool zone_covers(const Location& z, const Location& y) const {
    if (z.edge == y.edge) return t.down(z) <= t.down(y) + loc_snap_tol;
    return t.is_strict_ancestor_edge(z.edge, y.edge);
  }

  std::vector<Location> antichain(std::vector<Location> cuts) const {
    std::vector<Location> out;
    for (const Location& y : cuts) {
      bool covered = false;
      for (const Location& z : cuts) {
        if (&z == &y) continue;
        if (zone_covers(z, y) && (!zone_covers(y, z) || &z < &y)) {
          covered = true;  // equal zones keep the first of the pair
          break;
        }
      }
      if (!covered) out.push_back(y);
    }
    std::sort(out.begin(), out.end(), [](const Location& a, const Location& b) {
      return a.edge != b.edge ? a.edge < b.edge : a.offset < b.offset;
    });
    return out;
  }

  // region1 (frontier, cuts1) contained in region2 (same frontier, cuts2):
  // everything region2 removes must be removed by region1 as well.
  bool cuts_remove_at_least(const std::vector<Location>& cuts1,
                            const std::vector<Location>& cuts2) const {
    for (const Location& y2 : cuts2) {
      bool dominated = false;
      for (const Location& y1 : cuts1) {
        if (zone_covers(y1, y2)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) return false;
    }
    return true;
  }

  void dominate(std::vector<DPState>& states) const {
    std::vector<char> dead(states.size(), 0);
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (dead[i]) continue;
      for (std::size_t j = 0; j < states.size(); ++j) {
        if (i == j || dead[j]) continue;
        if (states[i].count <= states[j].count &&
            cuts_remove_at_least(states[i].cuts, states[j].cuts))
          dead[j] = 1;
      }
    }
    std::vector<DPState> kept;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (!dead[i]) kept.push_back(std::move(states[i]));
    states = std::move(kept);
  }

  // States at the top of edge e, regions being the germ of e at its top
  // vertex. Dead states (region already over the target) are dropped.
  std::vector<DPState> top_states(EdgeId e) {
    std::vector<DPState> states = enter_states(e);
    const double elen = t.tree().edge(e).length;
    const int n = prm.offsets_per_edge;
    for (int j = n - 1; j >= 1 && !overflow; --j) {
      const double d = elen * j / n;
      std::vector<DPState> next;
      for (DPState& s : states) {
        Subtree region{t.at_down(e, d), {}, s.cuts};
        if (a_of(region) > eps) continue;  // cannot close here or above
        next.push_back(s);                 // keep growing
        DPState cut;                       // close here, restart above
        cut.count = s.count + 1;
        cut.cuts = {t.at_down(e, d)};
        next.push_back(std::move(cut));
      }
      dominate(next);
      states = std::move(next);
      if (states.empty()) return states;  // no viable continuation through e
    }
    // arrival at the top vertex: drop states that can never close
    VertexId w = t.top_vertex(e);
    std::vector<DPState> alive;
    for (DPState& s : states) {
      Subtree region{t.vertex_location(w), {e}, s.cuts};
      if (a_of(region) <= eps) alive.push_back(std::move(s));
    }
    dominate(alive);
    return alive;
  }

  // States entering edge e at its bottom vertex.
  std::vector<DPState> enter_states(EdgeId e) {
    VertexId w = t.bottom_vertex(e);
    const std::vector<EdgeId>& kids = t.child_edges(w);
    if (kids.empty()) return {DPState{}};
    std::vector<std::vector<DPState>> child_states;
    for (EdgeId c : kids) {
      child_states.push_back(top_states(c));
      if (child_states.back().empty()) return {};  // subtree cannot be finished
    }
    return combine(w, kids, child_states, /*allow_continue=*/true);
  }

  // Enumerate set partitions of the child open regions into blocks joined
  // through the vertex; each closed block must meet the target and at most
  // one block survives rootward. allow_continue=false closes everything
  // (used at the root).
  std::vector<DPState> combine(VertexId w, const std::vector<EdgeId>& kids,
                               const std::vector<std::vector<DPState>>& child_states,
                               bool allow_continue) {
    const int d = static_cast<int>(kids.size());
    std::size_t combos = 1;
    for (const auto& cs : child_states) {
      combos *= cs.size();
      if (combos > prm.state_cap) {
        overflow = true;
        return {};
      }
    }
    std::vector<DPState> out;
    std::vector<int> pick(d, 0);
    std::vector<int> block_of(d, 0);

    auto emit = [&](int nblocks) {
      int base = 0;
      for (int i = 0; i < d; ++i) base += child_states[i][pick[i]].count;
      // per-block merged cut lists and block validity
      std::vector<std::vector<Location>> bcuts(nblocks);
      std::vector<std::vector<EdgeId>> bedges(nblocks);
      for (int i = 0; i < d; ++i) {
        const DPState& s = child_states[i][pick[i]];
        bcuts[block_of[i]].insert(bcuts[block_of[i]].end(), s.cuts.begin(), s.cuts.end());
        bedges[block_of[i]].push_back(kids[i]);
      }
      std::vector<char> closable(nblocks, 0);
      for (int b = 0; b < nblocks; ++b) {
        Subtree region{t.vertex_location(w), bedges[b], bcuts[b]};
        closable[b] = a_of(region) <= eps;
      }
      // continuing choice: none, or (below the root) one block with all
      // others closing
      const int cont_hi = allow_continue ? nblocks : 0;
      for (int cont = -1; cont < cont_hi; ++cont) {
        bool ok = true;
        for (int b = 0; b < nblocks; ++b)
          if (b != cont && !closable[b]) ok = false;
        if (!ok) continue;
        DPState s;
        s.count = base + nblocks - (cont >= 0 ? 1 : 0);
        for (int i = 0; i < d; ++i)
          if (cont >= 0 && block_of[i] == cont)
            s.cuts.insert(s.cuts.end(), child_states[i][pick[i]].cuts.begin(),
                          child_states[i][pick[i]].cuts.end());
          else
            s.cuts.push_back(t.at_down(kids[i], 0.0));  // settled branch germ
        s.cuts = antichain(std::move(s.cuts));
        out.push_back(std::move(s));
      }
    };

    auto partitions = [&](auto&& self, int i, int nblocks) -> void {
      if (i == d) {
        emit(nblocks);
        return;
      }
      for (int b = 0; b <= nblocks; ++b) {
        block_of[i] = b;
        self(self, i + 1, nblocks + (b == nblocks ? 1 : 0));
      }
    };

    for (;;) {
      partitions(partitions, 0, 0);
      int i = 0;
      while (i < d && ++pick[i] == static_cast<int>(child_states[i].size())) pick[i++] = 0;
      if (i == d) break;
    }
    dominate(out);
    return out;
  }
};

}  // namespace

ExactCoverResult exact_cover_count(const RootedTree& t, const StepWeight& u,
                                   const StepWeight& v, PNorm p, double eps,
                                   const ExactCoverParams& prm) {
  ExactCoverResult res;
  const MetricTree& mt = t.tree();
  if (mt.edge_count() > prm.max_edges) return res;
  for (VertexId w = 0; w < mt.vertex_count(); ++w)
    if (static_cast<int>(mt.incident(w).size()) > prm.max_degree) return res;

  Sweep sweep{t, u, v, p, eps, prm};
  const std::vector<EdgeId>& kids = t.child_edges(t.root());
  if (kids.empty()) return res;
  std::vector<std::vector<DPState>> child_states;
  for (EdgeId c : kids) {
    child_states.push_back(sweep.top_states(c));
    if (sweep.overflow) return res;
    if (child_states.back().empty()) return res;  // infeasible at this eps
  }
  std::vector<DPState> final_states =
      sweep.combine(t.root(), kids, child_states, /*allow_continue=*/false);
  if (sweep.overflow || final_states.empty()) return res;
  int best = std::numeric_limits<int>::max();
  for (const DPState& s : final_states) best = std::min(best, s.count);
  res.count = best;
  res.ran = true;
  return res;
}

RandomInstance random_instance(RandomStream& rng, const RandomTreeSpec& spec) {
  const int ne = static_cast<int>(rng.uniform_int(spec.edges_min, spec.edges_max));
  std::vector<Edge> edges;
  std::vector<int> degree{0};
  for (int e = 0; e < ne; ++e) {
    std::vector<int> open;
    for (std::size_t w = 0; w < degree.size(); ++w)
      if (degree[w] < spec.max_degree) open.push_back(static_cast<int>(w));
    int parent = open[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(open.size()) - 1))];
    double len = rng.uniform(spec.len_min, spec.len_max);
    edges.push_back(Edge{parent, static_cast<int>(degree.size()), len});
    degree[parent] += 1;
    degree.push_back(1);
  }
  MetricTree tree(static_cast<int>(degree.size()), edges);

  auto draw_weight = [&]() {
    StepWeight w;
    w.per_edge.resize(tree.edge_count());
    for (EdgeId e = 0; e < tree.edge_count(); ++e) {
      const double len = tree.edge(e).length;
      const int pieces = static_cast<int>(rng.uniform_int(1, spec.max_pieces));
      if (pieces == 1) {
        w.per_edge[e] = {WeightSegment{len, rng.uniform(spec.val_min, spec.val_max)}};
      } else {
        double frac = rng.uniform(0.25, 0.75);
        w.per_edge[e] = {WeightSegment{len * frac, rng.uniform(spec.val_min, spec.val_max)},
                         WeightSegment{len * (1.0 - frac), rng.uniform(spec.val_min, spec.val_max)}};
      }
    }
    return w;
  };
  StepWeight u = draw_weight();
  StepWeight v = draw_weight();
  return RandomInstance{std::move(tree), std::move(u), std::move(v)};
}

}  // namespace hardytree
