#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hardytree {

using VertexId = int;
using EdgeId = int;

// Offsets closer than this to an edge endpoint are snapped onto the vertex.
inline constexpr double loc_snap_tol = 1e-12;

struct Edge {
  VertexId from = -1;
  VertexId to = -1;
  double length = 0.0;
};

// A point of the tree: arclength offset along an edge, measured from the
// edge's 'from' endpoint. The same vertex can be written on any incident
// edge; canonical() picks one representative.
struct Location {
  EdgeId edge = -1;
  double offset = 0.0;
};

struct invalid_location : std::runtime_error {
  explicit invalid_location(const std::string& what) : std::runtime_error(what) {}
};

struct invalid_tree : std::runtime_error {
  explicit invalid_tree(const std::string& what) : std::runtime_error(what) {}
};

// Finite connected acyclic metric graph. Vertices are 0..n-1, edges carry
// positive lengths. Immutable after construction.
class MetricTree {
 public:
  MetricTree(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return nv_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<EdgeId>& incident(VertexId v) const { return incident_.at(v); }
  double total_length() const;

  // Throws invalid_tree on disconnectedness, cycles, or bad lengths.
  void validate() const;

  bool on_tree(Location x) const;
  // Vertex id when x sits on an endpoint (within snap tolerance), else none.
  std::optional<VertexId> vertex_at(Location x) const;

 private:
  int nv_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
};

// Record of the edge split performed when rooting at an edge-interior point.
struct SplitRecord {
  bool did_split = false;
  EdgeId original_edge = -1;
  double at_offset = 0.0;   // split position on the original edge
  EdgeId new_edge = -1;     // lower half, appended with a fresh id
  VertexId new_vertex = -1; // the promoted root
};

// A metric tree together with a root vertex and the induced orientation:
// every edge has a top endpoint (nearer the root) and a bottom endpoint.
// The partial order x "precedes" y means x lies on the path from the root
// to y. Immutable after construction.
class RootedTree {
 public:
  // If a is edge-interior the edge is split in the stored copy: the top part
  // keeps the original id, the bottom part gets id = old edge_count.
  static RootedTree root_at(const MetricTree& t, Location a);

  const MetricTree& tree() const { return tree_; }
  VertexId root() const { return root_; }
  const SplitRecord& split() const { return split_; }

  VertexId top_vertex(EdgeId e) const { return top_is_from_[e] ? tree_.edge(e).from : tree_.edge(e).to; }
  VertexId bottom_vertex(EdgeId e) const { return top_is_from_[e] ? tree_.edge(e).to : tree_.edge(e).from; }
  EdgeId parent_edge(VertexId v) const { return parent_edge_[v]; } // -1 at the root
  const std::vector<EdgeId>& child_edges(VertexId v) const { return child_edges_[v]; }
  double vertex_depth(VertexId v) const { return depth_[v]; }
  // Edge ids in depth-first preorder from the root; parents precede children.
  const std::vector<EdgeId>& preorder_edges() const { return preorder_; }

  // Distance from the top endpoint along the edge.
  double down(Location x) const;
  Location at_down(EdgeId e, double d) const;
  Location vertex_location(VertexId v) const;
  double depth_of(Location x) const { return depth_[top_vertex(x.edge)] + down(x); }

  // Snap near-endpoint offsets; vertex points are rewritten onto the parent
  // edge (bottom end), except the root which keeps a child-edge top-end form.
  Location canonical(Location x) const;
  bool same_point(Location x, Location y) const;

  bool is_strict_ancestor_edge(EdgeId e, EdgeId f) const; // e on the root path of f, e != f

  // x precedes y in the order rooted at this tree's root.
  bool precedes(Location x, Location y) const;
  // x lies strictly below the directed germ c: inside c's edge beyond its
  // offset, or deeper. A germ at offset 0 excludes the edge's top vertex; a
  // germ at full length captures every strict descendant of the bottom vertex.
  bool strictly_below(Location c, Location x) const;

  // Child edge of v through which the path v -> x departs; nullopt when x is
  // v itself or not below v.
  std::optional<EdgeId> departing_edge(VertexId v, Location x) const;

  double distance(Location x, Location y) const;
  // Contiguous traversal x -> y as (edge, start offset, end offset) steps in
  // 'from'-offset coordinates; empty when x == y.
  std::vector<std::tuple<EdgeId, double, double>> path(Location x, Location y) const;

 private:
  MetricTree tree_{0, {}};
  VertexId root_ = -1;
  SplitRecord split_;
  std::vector<char> top_is_from_;
  std::vector<EdgeId> parent_edge_;
  std::vector<std::vector<EdgeId>> child_edges_;
  std::vector<double> depth_;
  std::vector<EdgeId> preorder_;

  RootedTree() = default;
};

// Connected closed region: everything at or below the anchor, minus the
// strict-descendant sets of the cut germs. branches restricts the directions
// taken at a vertex anchor (empty = all child edges).
struct Subtree {
  Location anchor;
  std::vector<EdgeId> branches;
  std::vector<Location> cuts;
};

Subtree whole_tree(const RootedTree& t);

bool subtree_contains(const RootedTree& t, const Subtree& k, Location x);

// K intersected with edge e as a down-coordinate interval; nullopt when the
// intersection is empty. Intervals may be degenerate (single point).
std::optional<std::pair<double, double>> kept_span(const RootedTree& t, const Subtree& k, EdgeId e);

double subtree_length(const RootedTree& t, const Subtree& k);

std::vector<Subtree> components_after_removal(const RootedTree& t, Location x);

struct Partition {
  Subtree parent;
  std::vector<Subtree> parts;
};

struct PartitionReport {
  bool valid = true;
  std::vector<std::string> findings;        // human-readable diagnostics
  std::vector<Location> witnesses;          // a point inside each gap/overlap
};

PartitionReport validate_partition(const RootedTree& t, const Partition& p);

}  // namespace hardytree
