#include "hardytree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace hardytree {

MetricTree::MetricTree(int vertex_count, std::vector<Edge> edges)
    : nv_(vertex_count), edges_(std::move(edges)), incident_(vertex_count) {
  for (EdgeId e = 0; e < static_cast<EdgeId>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    if (ed.from < 0 || ed.from >= nv_ || ed.to < 0 || ed.to >= nv_)
      throw invalid_tree("edge endpoint out of range");
    incident_[ed.from].push_back(e);
    incident_[ed.to].push_back(e);
  }
}

double MetricTree::total_length() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.length;
  return s;
}

void MetricTree::validate() const {
  if (nv_ <= 0) throw invalid_tree("tree has no vertices");
  if (static_cast<int>(edges_.size()) != nv_ - 1)
    throw invalid_tree("edge count must equal vertex count - 1");
  for (const Edge& e : edges_)
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw invalid_tree("edge lengths must be positive and finite");
  std::vector<char> seen(nv_, 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (EdgeId e : incident_[v]) {
      VertexId w = edges_[e].from == v ? edges_[e].to : edges_[e].from;
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  if (reached != nv_) throw invalid_tree("tree is not connected");
}

bool MetricTree::on_tree(Location x) const {
  if (x.edge < 0 || x.edge >= edge_count()) return false;
  return x.offset >= -loc_snap_tol && x.offset <= edges_[x.edge].length + loc_snap_tol;
}

std::optional<VertexId> MetricTree::vertex_at(Location x) const {
  if (!on_tree(x)) return std::nullopt;
  const Edge& e = edges_[x.edge];
  if (x.offset <= loc_snap_tol) return e.from;
  if (x.offset >= e.length - loc_snap_tol) return e.to;
  return std::nullopt;
}

RootedTree RootedTree::root_at(const MetricTree& t, Location a) {
  if (!t.on_tree(a)) throw invalid_location("root location is off the tree");
  t.validate();

  RootedTree r;
  int nv = t.vertex_count();
  std::vector<Edge> edges;
  edges.reserve(t.edge_count() + 1);
  for (EdgeId e = 0; e < t.edge_count(); ++e) edges.push_back(t.edge(e));

  VertexId root;
  if (auto v = t.vertex_at(a)) {
    root = *v;
  } else {
    Edge& ed = edges[a.edge];
    r.split_.did_split = true;
    r.split_.original_edge = a.edge;
    r.split_.at_offset = a.offset;
    r.split_.new_vertex = nv;
    r.split_.new_edge = static_cast<EdgeId>(edges.size());
    edges.push_back(Edge{nv, ed.to, ed.length - a.offset});
    ed.to = nv;
    ed.length = a.offset;
    root = nv;
    ++nv;
  }

  r.tree_ = MetricTree(nv, std::move(edges));
  r.root_ = root;

  const int ne = r.tree_.edge_count();
  r.top_is_from_.assign(ne, 0);
  r.parent_edge_.assign(nv, -1);
  r.child_edges_.assign(nv, {});
  r.depth_.assign(nv, 0.0);

  std::vector<char> edge_seen(ne, 0);
  std::queue<VertexId> q;
  q.push(root);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    std::vector<EdgeId> inc = r.tree_.incident(v);
    std::sort(inc.begin(), inc.end());
    for (EdgeId e : inc) {
      if (edge_seen[e]) continue;
      edge_seen[e] = 1;
      const Edge& ed = r.tree_.edge(e);
      VertexId w = ed.from == v ? ed.to : ed.from;
      r.top_is_from_[e] = (ed.from == v);
      r.parent_edge_[w] = e;
      r.child_edges_[v].push_back(e);
      r.depth_[w] = r.depth_[v] + ed.length;
      q.push(w);
    }
  }

  r.preorder_.reserve(ne);
  std::vector<EdgeId> stack(r.child_edges_[root].rbegin(), r.child_edges_[root].rend());
  while (!stack.empty()) {
    EdgeId e = stack.back();
    stack.pop_back();
    r.preorder_.push_back(e);
    const auto& kids = r.child_edges_[r.bottom_vertex(e)];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return r;
}

double RootedTree::down(Location x) const {
  const double len = tree_.edge(x.edge).length;
  const double off = std::clamp(x.offset, 0.0, len);
  return top_is_from_[x.edge] ? off : len - off;
}

Location RootedTree::at_down(EdgeId e, double d) const {
  const double len = tree_.edge(e).length;
  d = std::clamp(d, 0.0, len);
  return Location{e, top_is_from_[e] ? d : len - d};
}

Location RootedTree::vertex_location(VertexId v) const {
  if (v == root_) {
    if (child_edges_[v].empty()) throw invalid_tree("root has no incident edge");
    return at_down(child_edges_[v][0], 0.0);
  }
  EdgeId pe = parent_edge_[v];
  return at_down(pe, tree_.edge(pe).length);
}

Location RootedTree::canonical(Location x) const {
  if (!tree_.on_tree(x)) throw invalid_location("location is off the tree");
  if (auto v = tree_.vertex_at(x)) return vertex_location(*v);
  return Location{x.edge, std::clamp(x.offset, 0.0, tree_.edge(x.edge).length)};
}

bool RootedTree::same_point(Location x, Location y) const {
  Location cx = canonical(x), cy = canonical(y);
  return cx.edge == cy.edge && std::abs(cx.offset - cy.offset) <= loc_snap_tol;
}

bool RootedTree::is_strict_ancestor_edge(EdgeId e, EdgeId f) const {
  EdgeId g = f;
  while (true) {
    g = parent_edge_[top_vertex(g)];
    if (g < 0) return false;
    if (g == e) return true;
  }
}

bool RootedTree::precedes(Location x, Location y) const {
  if (auto vx = tree_.vertex_at(x); vx && *vx == root_) return true;
  Location cx = canonical(x), cy = canonical(y);
  if (cx.edge == cy.edge) return down(cx) <= down(cy) + loc_snap_tol;
  return is_strict_ancestor_edge(cx.edge, cy.edge);
}

bool RootedTree::strictly_below(Location c, Location x) const {
  Location cx = canonical(x);
  if (cx.edge == c.edge) return down(cx) > down(c) + loc_snap_tol;
  return is_strict_ancestor_edge(c.edge, cx.edge);
}

std::optional<EdgeId> RootedTree::departing_edge(VertexId v, Location x) const {
  Location cx = canonical(x);
  if (auto vx = tree_.vertex_at(cx); vx && *vx == v) return std::nullopt;
  EdgeId g = cx.edge;
  while (true) {
    if (top_vertex(g) == v) return g;
    g = parent_edge_[top_vertex(g)];
    if (g < 0) return std::nullopt;
  }
}

std::vector<std::tuple<EdgeId, double, double>> RootedTree::path(Location x, Location y) const {
  Location ax = canonical(x), ay = canonical(y);
  std::vector<std::tuple<EdgeId, double, double>> up, dn;
  auto top_off = [&](EdgeId e) { return top_is_from_[e] ? 0.0 : tree_.edge(e).length; };
  while (!same_point(ax, ay)) {
    if (ax.edge == ay.edge) {
      up.emplace_back(ax.edge, ax.offset, ay.offset);
      ax = ay;
      break;
    }
    if (depth_of(ax) >= depth_of(ay)) {
      if (down(ax) > loc_snap_tol) up.emplace_back(ax.edge, ax.offset, top_off(ax.edge));
      ax = canonical(at_down(ax.edge, 0.0));
    } else {
      if (down(ay) > loc_snap_tol) dn.emplace_back(ay.edge, top_off(ay.edge), ay.offset);
      ay = canonical(at_down(ay.edge, 0.0));
    }
  }
  for (auto it = dn.rbegin(); it != dn.rend(); ++it) up.push_back(*it);
  return up;
}

double RootedTree::distance(Location x, Location y) const {
  double s = 0.0;
  for (const auto& [e, a, b] : path(x, y)) {
    (void)e;
    s += std::abs(b - a);
  }
  return s;
}

Subtree whole_tree(const RootedTree& t) {
  return Subtree{t.vertex_location(t.root()), {}, {}};
}

bool subtree_contains(const RootedTree& t, const Subtree& k, Location x) {
  Location cx = t.canonical(x);
  if (!t.precedes(k.anchor, cx)) return false;
  if (!k.branches.empty()) {
    if (auto va = t.tree().vertex_at(k.anchor)) {
      if (auto dep = t.departing_edge(*va, cx)) {
        if (std::find(k.branches.begin(), k.branches.end(), *dep) == k.branches.end())
          return false;
      }
    }
  }
  for (const Location& c : k.cuts)
    if (t.strictly_below(c, cx)) return false;
  return true;
}

std::optional<std::pair<double, double>> kept_span(const RootedTree& t, const Subtree& k,
                                                   EdgeId e) {
  const double len = t.tree().edge(e).length;
  auto va = t.tree().vertex_at(k.anchor);
  Location ca = t.canonical(k.anchor);

  double lo;
  if (!va && ca.edge == e) {
    lo = t.down(ca);
  } else if (va && t.top_vertex(e) == *va) {
    if (!k.branches.empty() &&
        std::find(k.branches.begin(), k.branches.end(), e) == k.branches.end())
      return std::nullopt;
    lo = 0.0;
  } else if (subtree_contains(t, k, t.at_down(e, 0.0))) {
    // Top endpoint lies in K, so the edge is entered from above. Cuts at the
    // exact top vertex still pinch the span to that single point (below).
    lo = 0.0;
  } else {
    return std::nullopt;
  }

  double hi = len;
  bool pinched = false;
  for (const Location& c : k.cuts) {
    if (c.edge == e) {
      hi = std::min(hi, t.down(c));
    } else if (t.is_strict_ancestor_edge(c.edge, e)) {
      // The whole interior of e is strictly below c; only the top endpoint
      // can survive, and only when c is exactly that vertex germ.
      const double clen = t.tree().edge(c.edge).length;
      bool cut_is_top_vertex = t.down(c) >= clen - loc_snap_tol &&
                               t.bottom_vertex(c.edge) == t.top_vertex(e);
      if (cut_is_top_vertex)
        pinched = true;
      else
        return std::nullopt;
    }
  }
  if (pinched) {
    if (lo <= loc_snap_tol) return std::make_pair(0.0, 0.0);
    return std::nullopt;
  }
  if (hi < lo - loc_snap_tol) return std::nullopt;
  return std::make_pair(lo, std::max(lo, hi));
}

double subtree_length(const RootedTree& t, const Subtree& k) {
  double s = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e)
    if (auto sp = kept_span(t, k, e)) s += sp->second - sp->first;
  return s;
}

std::vector<Subtree> components_after_removal(const RootedTree& t, Location x) {
  std::vector<Subtree> out;
  Location cx = t.canonical(x);
  Location root_loc = t.vertex_location(t.root());
  if (auto v = t.tree().vertex_at(cx)) {
    for (EdgeId c : t.child_edges(*v)) out.push_back(Subtree{cx, {c}, {}});
    if (*v != t.root()) {
      EdgeId pe = t.parent_edge(*v);
      Location germ = t.at_down(pe, t.tree().edge(pe).length);
      out.push_back(Subtree{root_loc, {}, {germ}});
    }
  } else {
    out.push_back(Subtree{cx, {}, {}});
    out.push_back(Subtree{root_loc, {}, {cx}});
  }
  return out;
}

PartitionReport validate_partition(const RootedTree& t, const Partition& p) {
  PartitionReport rep;
  const double tol = 1e-9;
  auto fail = [&](const std::string& msg, Location w) {
    rep.valid = false;
    rep.findings.push_back(msg);
    rep.witnesses.push_back(w);
  };
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    auto parent = kept_span(t, p.parent, e);
    std::vector<std::pair<double, double>> spans;
    for (const Subtree& part : p.parts) {
      if (auto sp = kept_span(t, part, e)) {
        if (sp->second - sp->first <= tol) continue;  // shared single points allowed
        if (!parent)
          fail("part exceeds parent on edge " + std::to_string(e),
               t.at_down(e, 0.5 * (sp->first + sp->second)));
        else if (sp->first < parent->first - tol || sp->second > parent->second + tol)
          fail("part exceeds parent span on edge " + std::to_string(e),
               t.at_down(e, 0.5 * (sp->first + sp->second)));
        spans.push_back(*sp);
      }
    }
    std::sort(spans.begin(), spans.end());
    for (size_t i = 0; i + 1 < spans.size(); ++i) {
      if (spans[i].second > spans[i + 1].first + tol)
        fail("parts overlap on edge " + std::to_string(e),
             t.at_down(e, 0.5 * (std::max(spans[i].first, spans[i + 1].first) +
                                 std::min(spans[i].second, spans[i + 1].second))));
    }
    if (parent && parent->second - parent->first > tol) {
      double cursor = parent->first;
      for (const auto& sp : spans) {
        if (sp.first > cursor + tol) {
          fail("cover gap on edge " + std::to_string(e), t.at_down(e, 0.5 * (cursor + sp.first)));
          break;
        }
        cursor = std::max(cursor, sp.second);
      }
      if (cursor < parent->second - tol)
        fail("cover gap on edge " + std::to_string(e),
             t.at_down(e, 0.5 * (cursor + parent->second)));
    }
  }
  return rep;
}

}  // namespace hardytree
