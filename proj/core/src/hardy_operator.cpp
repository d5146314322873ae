#include "hardytree/hardy_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <tuple>

#include "hardytree/random.hpp"

namespace hardytree {

namespace {

std::vector<int> native_parents(const QuadGrid& g) {
  std::vector<int> par(g.size());
  for (int i = 0; i < g.size(); ++i) par[i] = g.nodes[i].parent;
  return par;
}

// Children-after-parents order for an arbitrary parent forest (rerooted
// chains are BFS-numbered, not index-sorted).
std::vector<int> topo_order(const std::vector<int>& par) {
  const int n = static_cast<int>(par.size());
  std::vector<std::vector<int>> ch(n);
  std::vector<int> order, stack;
  order.reserve(n);
  for (int i = n - 1; i >= 0; --i) {
    if (par[i] >= 0)
      ch[par[i]].push_back(i);
    else
      stack.push_back(i);
  }
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    order.push_back(i);
    for (int j : ch[i]) stack.push_back(j);
  }
  return order;
}

double qdot(const QuadGrid& g, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) s += g.nodes[i].q * a[i] * b[i];
  return s;
}

struct PowerResult {
  double value = 0.0;
  bool converged = false;
};

// Block subspace iteration on B*B in function coordinates with the q-inner
// product; deflate removes the output-side projection onto span{v}. A block
// wider than the top cluster keeps the Ritz value accurate even when the
// leading singular values nearly coincide, where single-vector power
// iteration stagnates below any increment test.
PowerResult power_top(const QuadGrid& g, const std::vector<int>& par, bool deflate,
                      std::vector<double>* f_out) {
  const int n = g.size();
  if (n == 0) return {0.0, true};
  std::vector<double> vvec(n);
  for (int i = 0; i < n; ++i) vvec[i] = g.nodes[i].v;
  const double vv = qdot(g, vvec, vvec);
  if (deflate && vv <= 0.0) deflate = false;

  auto op = [&](const std::vector<double>& x) {
    std::vector<double> y = apply_chains(g, par, x);
    if (deflate) {
      double c = qdot(g, y, vvec) / vv;
      for (int i = 0; i < n; ++i) y[i] -= c * vvec[i];
    }
    return apply_adjoint_chains(g, par, y);
  };

  const int b = std::min(4, n);
  RandomStream rs(0x517cc1b727220a95ULL ^ (static_cast<std::uint64_t>(n) * 0x9e3779b97f4a7c15ULL));
  std::vector<std::vector<double>> basis(b, std::vector<double>(n));
  for (auto& col : basis)
    for (double& x : col) x = rs.uniform() - 0.5;

  // Modified Gram-Schmidt in the q-inner product; re-randomizes a column that
  // collapses so the block keeps full rank.
  auto orthonormalize = [&](std::vector<std::vector<double>>& cols) {
    for (int j = 0; j < b; ++j) {
      for (int attempt = 0;; ++attempt) {
        for (int i = 0; i < j; ++i) {
          double c = qdot(g, cols[i], cols[j]);
          for (int r = 0; r < n; ++r) cols[j][r] -= c * cols[i][r];
        }
        double nj = std::sqrt(qdot(g, cols[j], cols[j]));
        if (nj > 1e-150) {
          for (double& x : cols[j]) x /= nj;
          break;
        }
        if (attempt >= 3) return false;
        for (double& x : cols[j]) x = rs.uniform() - 0.5;
      }
    }
    return true;
  };
  if (!orthonormalize(basis)) return {0.0, true};  // q-degenerate space

  double theta = 0.0, prev = -1.0;
  int calm = 0;
  bool conv = false;
  std::vector<double> gram(static_cast<size_t>(b) * b);
  std::vector<std::vector<double>> image(b);
  for (int it = 0; it < 600; ++it) {
    for (int j = 0; j < b; ++j) image[j] = op(basis[j]);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) gram[static_cast<size_t>(i) * b + j] = qdot(g, basis[i], image[j]);
    theta = top_singular_value(gram, b, b);  // symmetric PSD: top eigenvalue
    if (theta <= 0.0) {
      conv = true;
      break;
    }
    if (std::abs(theta - prev) <= 1e-13 * theta) {
      if (++calm >= 3) {
        conv = true;
        break;
      }
    } else {
      calm = 0;
    }
    prev = theta;
    std::swap(basis, image);
    if (!orthonormalize(basis)) break;
  }
  if (f_out) *f_out = basis[0];
  return {std::sqrt(std::max(0.0, theta)), conv};
}

double deflated_top_dense(const QuadGrid& g) {
  const int n = g.size();
  if (n == 0) return 0.0;
  std::vector<double> b = weighted_matrix(g);
  std::vector<double> vt(n);
  double vv = 0.0;
  for (int i = 0; i < n; ++i) {
    vt[i] = std::sqrt(g.nodes[i].q) * g.nodes[i].v;
    vv += vt[i] * vt[i];
  }
  if (vv <= 0.0) return top_singular_value(std::move(b), n, n);
  std::vector<double> z(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double w = vt[i];
    if (w == 0.0) continue;
    const double* row = &b[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j) z[j] += w * row[j];
  }
  for (double& x : z) x /= vv;
  rank1_downdate(b, n, n, z, vt);
  return top_singular_value(std::move(b), n, n);
}

double deflated_top(const QuadGrid& g) {
  PowerResult pr = power_top(g, native_parents(g), true, nullptr);
  if (pr.converged) return pr.value;
  return deflated_top_dense(g);
}

double top_sv(const QuadGrid& g, const std::vector<int>& par) {
  PowerResult pr = power_top(g, par, false, nullptr);
  if (pr.converged) return pr.value;
  return top_singular_value(weighted_matrix(g, par), g.size(), g.size());
}

// --- closed-form machinery -------------------------------------------------

double seg_integral(const std::vector<WeightSegment>& segs, double a, double b) {
  double lo = std::min(a, b), hi = std::max(a, b);
  double cum = 0.0, acc = 0.0;
  for (const WeightSegment& s : segs) {
    double s0 = cum, s1 = cum + s.len;
    cum = s1;
    double o = std::min(hi, s1) - std::max(lo, s0);
    if (o > 0) acc += o * s.value;
  }
  return acc;
}

double path_weight_integral(const RootedTree& t, const StepWeight& w, Location x, Location y) {
  double acc = 0.0;
  for (const auto& [e, o1, o2] : t.path(x, y)) acc += seg_integral(w.per_edge[e], o1, o2);
  return acc;
}

// (down-start, down-end, value) pieces of w on edge e clipped to [lo, hi].
std::vector<std::tuple<double, double, double>> clipped_down_pieces(const RootedTree& t,
                                                                   const StepWeight& w, EdgeId e,
                                                                   double lo, double hi) {
  std::vector<std::tuple<double, double, double>> out;
  double cum = 0.0;
  for (const WeightSegment& s : down_segments(t, w, e)) {
    double d0 = std::max(cum, lo), d1 = std::min(cum + s.len, hi);
    cum += s.len;
    if (d1 - d0 > loc_snap_tol) out.emplace_back(d0, d1, s.value);
  }
  return out;
}

double edge_clipped_mass(const RootedTree& t, const StepWeight& w, EdgeId e, double lo, double hi) {
  double acc = 0.0;
  for (const auto& [d0, d1, val] : clipped_down_pieces(t, w, e, lo, hi)) acc += (d1 - d0) * val;
  return acc;
}

using SpanMap = std::vector<std::optional<std::pair<double, double>>>;

SpanMap region_spans(const RootedTree& t, const Subtree& k) {
  SpanMap sp(t.tree().edge_count());
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) sp[e] = kept_span(t, k, e);
  return sp;
}

// Entry point of K on the path from a (the unique boundary point crossed).
Location gate_into(const RootedTree& t, const Subtree& k, Location a) {
  if (subtree_contains(t, k, a)) return t.canonical(a);
  std::vector<Location> cand{k.anchor};
  cand.insert(cand.end(), k.cuts.begin(), k.cuts.end());
  const double da = t.distance(a, k.anchor);
  Location best = t.canonical(k.anchor);
  double bd = da;
  for (const Location& c : cand) {
    if (!subtree_contains(t, k, c)) continue;
    double d1 = t.distance(a, c), d2 = t.distance(c, k.anchor);
    if (d1 + d2 <= da + 1e-9 * (1.0 + da) && d1 < bd) {
      bd = d1;
      best = t.canonical(c);
    }
  }
  return best;
}

// v-mass of K strictly below each vertex, in root order.
std::vector<double> descendant_mass(const RootedTree& t, const StepWeight& v, const SpanMap& sp) {
  std::vector<double> vsub(t.tree().vertex_count(), 0.0);
  const auto& pre = t.preorder_edges();
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    EdgeId e = *it;
    if (!sp[e]) continue;
    double m = edge_clipped_mass(t, v, e, sp[e]->first, sp[e]->second);
    vsub[t.top_vertex(e)] += m + vsub[t.bottom_vertex(e)];
  }
  return vsub;
}

}  // namespace

// --- discretized action ----------------------------------------------------

DiscretizedOperator discretize(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                               const Subtree& k, PNorm p, const GridParams& prm) {
  DiscretizedOperator op;
  op.host = &t;
  op.p = p;
  op.grid = build_grid(t, u, v, k, prm);
  return op;
}

// Each node's own cell enters the running integral at half weight: the node
// sits at the cell midpoint, so only half its cell lies behind it. This keeps
// the quadrature at midpoint-rule accuracy and makes the discrete quotient
// value nearly independent of the rooting point.
std::vector<double> apply_chains(const QuadGrid& g, const std::vector<int>& par,
                                 const std::vector<double>& f) {
  const int n = g.size();
  std::vector<double> cum(n, 0.0), out(n, 0.0);
  for (int i : topo_order(par)) {
    const double own = g.nodes[i].u * g.nodes[i].q * f[i];
    cum[i] = own + (par[i] >= 0 ? cum[par[i]] : 0.0);
    out[i] = g.nodes[i].v * (cum[i] - 0.5 * own);
  }
  return out;
}

std::vector<double> apply_adjoint_chains(const QuadGrid& g, const std::vector<int>& par,
                                         const std::vector<double>& psi) {
  const int n = g.size();
  std::vector<double> s(n, 0.0), out(n, 0.0);
  std::vector<int> order = topo_order(par);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int i = *it;
    const double own = g.nodes[i].v * g.nodes[i].q * psi[i];
    s[i] += own;
    out[i] = g.nodes[i].u * (s[i] - 0.5 * own);
    if (par[i] >= 0) s[par[i]] += s[i];
  }
  return out;
}

std::vector<double> apply(const DiscretizedOperator& op, const std::vector<double>& f) {
  return apply_chains(op.grid, native_parents(op.grid), f);
}

std::vector<double> weighted_matrix(const QuadGrid& g) {
  return weighted_matrix(g, native_parents(g));
}

std::vector<double> weighted_matrix(const QuadGrid& g, const std::vector<int>& par) {
  const size_t n = static_cast<size_t>(g.size());
  std::vector<double> b(n * n, 0.0);
  for (int i : topo_order(par)) {
    double* row = &b[static_cast<size_t>(i) * n];
    if (par[i] >= 0) {
      const int pe = par[i];
      std::memcpy(row, &b[static_cast<size_t>(pe) * n], n * sizeof(double));
      row[pe] = g.nodes[pe].u * std::sqrt(g.nodes[pe].q);  // parent cell fully behind i
    }
    row[i] = 0.5 * g.nodes[i].u * std::sqrt(g.nodes[i].q);  // own cell at half weight
  }
  for (size_t i = 0; i < n; ++i) {
    const double s = g.nodes[i].v * std::sqrt(g.nodes[i].q);
    double* row = &b[i * n];
    for (size_t j = 0; j < n; ++j) row[j] *= s;
  }
  return b;  // row-major S == column-major S^T
}

// --- closed forms at the endpoint exponents --------------------------------

double op_norm_closed_pinf(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                           const Subtree& k, Location x) {
  Location base = gate_into(t, k, x);
  SpanMap sp = region_spans(t, k);
  double best = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    if (!sp[e] || sp[e]->second - sp[e]->first <= loc_snap_tol) continue;
    for (const auto& [d0, d1, val] : clipped_down_pieces(t, v, e, sp[e]->first, sp[e]->second)) {
      if (val <= 0.0) continue;
      for (double d : {d0, d1}) {
        double w = path_weight_integral(t, u, base, t.at_down(e, d));
        best = std::max(best, val * w);
      }
    }
  }
  return best;
}

double op_norm_closed_p1(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                         const Subtree& k) {
  SpanMap sp = region_spans(t, k);
  std::vector<double> vsub = descendant_mass(t, v, sp);
  double best = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    if (!sp[e] || sp[e]->second - sp[e]->first <= loc_snap_tol) continue;
    const auto [lo, hi] = *sp[e];
    for (const auto& [d0, d1, val] : clipped_down_pieces(t, u, e, lo, hi)) {
      if (val <= 0.0) continue;
      double below = edge_clipped_mass(t, v, e, d0, hi) + vsub[t.bottom_vertex(e)];
      best = std::max(best, val * below);
    }
  }
  return best;
}

// --- dual-exponent ascent (finite p > 1) -----------------------------------

namespace {

struct AscentOutcome {
  double value = 0.0;
  bool converged = false;
  std::vector<double> f;
};

template <class Ap, class Adj>
AscentOutcome ascent_core(const QuadGrid& g, PNorm p, Ap&& apply_fn, Adj&& adjoint_fn,
                          const std::vector<std::vector<double>>& starts, int max_iter) {
  const int n = g.size();
  const double pp = p.p, qq = p.conjugate();
  AscentOutcome best;
  for (const auto& s0 : starts) {
    std::vector<double> f = s0;
    double nf = grid_norm(g, f, p);
    if (nf <= 0.0) continue;
    for (double& x : f) x /= nf;
    std::vector<double> hist;
    hist.reserve(256);
    double val = 0.0;
    bool conv = false;
    for (int it = 0; it < max_iter; ++it) {
      std::vector<double> gv = apply_fn(f);
      val = grid_norm(g, gv, p);
      hist.push_back(val);
      if (val <= 0.0) {
        conv = true;
        break;
      }
      if (it >= 50 && val - hist[it - 50] < 1e-8 * val) {
        conv = true;
        break;
      }
      double mg = 0.0;
      for (double x : gv) mg = std::max(mg, std::abs(x));
      std::vector<double> psi(n, 0.0);
      for (int i = 0; i < n; ++i)
        if (gv[i] != 0.0)
          psi[i] = std::copysign(std::pow(std::abs(gv[i]) / mg, pp - 1.0), gv[i]);
      std::vector<double> phi = adjoint_fn(psi);
      double mp = 0.0;
      for (double x : phi) mp = std::max(mp, std::abs(x));
      if (mp <= 0.0) {
        conv = true;
        break;
      }
      for (int i = 0; i < n; ++i)
        f[i] = phi[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(phi[i]) / mp, qq - 1.0), phi[i]);
      nf = grid_norm(g, f, p);
      if (nf <= 0.0) {
        conv = true;
        break;
      }
      for (double& x : f) x /= nf;
    }
    if (val > best.value || (val == best.value && conv && !best.converged)) {
      best.value = val;
      best.converged = conv;
      best.f = f;
    }
  }
  if (best.f.empty()) best.converged = true;  // null operator
  return best;
}

std::vector<std::vector<double>> ascent_starts(const QuadGrid& g, const std::vector<int>& par,
                                               int randoms, const std::vector<double>* warm) {
  const int n = g.size();
  std::vector<std::vector<double>> starts;
  if (warm && static_cast<int>(warm->size()) == n) starts.push_back(*warm);
  std::vector<double> f2;
  power_top(g, par, false, &f2);
  if (static_cast<int>(f2.size()) == n) starts.push_back(std::move(f2));
  RandomStream rs(0x2545f4914f6cdd1dULL ^ (static_cast<std::uint64_t>(n) << 17));
  for (int s = 0; s < randoms; ++s) {
    std::vector<double> f(n);
    for (double& x : f) x = 0.05 + rs.uniform();
    starts.push_back(std::move(f));
  }
  return starts;
}

AscentOutcome ascent_chain_norm(const QuadGrid& g, const std::vector<int>& par, PNorm p,
                                int randoms, const std::vector<double>* warm) {
  auto ap = [&](const std::vector<double>& f) { return apply_chains(g, par, f); };
  auto adj = [&](const std::vector<double>& psi) { return apply_adjoint_chains(g, par, psi); };
  return ascent_core(g, p, ap, adj, ascent_starts(g, par, randoms, warm), 2000);
}

}  // namespace

// --- operator norms --------------------------------------------------------

NormResult op_norm(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                   const Subtree& k, PNorm p, const GridParams& prm) {
  if (p.is_inf()) {
    Location base = gate_into(t, k, t.vertex_location(t.root()));
    return {op_norm_closed_pinf(t, u, v, k, base), false};
  }
  if (p.is_one()) return {op_norm_closed_p1(t, u, v, k), false};
  QuadGrid g = build_grid(t, u, v, k, prm);
  std::vector<int> par = native_parents(g);
  if (p.p == 2.0) return {top_sv(g, par), false};
  AscentOutcome a = ascent_chain_norm(g, par, p, 12, nullptr);
  return {a.value, !a.converged};
}

NormResult op_norm_from(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                        const Subtree& k, PNorm p, const GridParams& prm, Location x) {
  if (p.is_inf()) return {op_norm_closed_pinf(t, u, v, k, x), false};
  if (p.is_one())
    throw unsupported_exponent("p=1 operator norm is defined from the tree root only");
  QuadGrid g = build_grid(t, u, v, k, prm);
  std::vector<int> par = reroot_parents(t, g, x);
  if (p.p == 2.0) return {top_sv(g, par), false};
  AscentOutcome a = ascent_chain_norm(g, par, p, 12, nullptr);
  return {a.value, !a.converged};
}

std::vector<double> approx_numbers_p2(const RootedTree& t, const StepWeight& u,
                                      const StepWeight& v, const Subtree& k, int count,
                                      const GridParams& prm) {
  QuadGrid g = build_grid(t, u, v, k, prm);
  const int n = g.size();
  std::vector<double> sv;
  if (n > 0) sv = singular_values(weighted_matrix(g), n, n);
  sv.resize(std::max(count, 0), 0.0);
  return sv;
}

// --- root scan -------------------------------------------------------------

RootScanResult min_norm_over_roots(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                   const Subtree& k, PNorm p, const GridParams& prm) {
  if (p.is_one())
    throw unsupported_exponent("the minimum-over-roots characterization requires p > 1");

  QuadGrid g;
  std::vector<double> warm;
  bool first_eval = true;
  bool any_unconverged = false;
  if (!p.is_inf()) g = build_grid(t, u, v, k, prm);

  auto objective = [&](Location x) -> double {
    if (p.is_inf()) return op_norm_closed_pinf(t, u, v, k, x);
    std::vector<int> par = reroot_parents(t, g, x);
    if (p.p == 2.0) return top_sv(g, par);
    AscentOutcome a =
        ascent_chain_norm(g, par, p, first_eval ? 12 : 1, warm.empty() ? nullptr : &warm);
    first_eval = false;
    if (!a.converged) any_unconverged = true;
    if (!a.f.empty()) warm = a.f;
    return a.value;
  };

  RootScanResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto key_of = [&](Location x) {
    Location c = t.canonical(x);
    return std::pair<int, double>(c.edge, t.down(c));
  };
  auto consider = [&](Location x) {
    double val = objective(x);
    bool take;
    if (!std::isfinite(best.value) || val < best.value * (1.0 - 1e-12))
      take = true;
    else
      take = val <= best.value * (1.0 + 1e-12) && key_of(x) < key_of(best.argmin);
    if (take) {
      best.value = val;
      best.argmin = t.canonical(x);
    }
    return val;
  };

  consider(k.anchor);
  for (VertexId vx = 0; vx < t.tree().vertex_count(); ++vx) {
    Location lx = t.vertex_location(vx);
    if (subtree_contains(t, k, lx)) consider(lx);
  }

  SpanMap sp = region_spans(t, k);
  std::vector<std::pair<double, EdgeId>> edge_rank;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    if (!sp[e] || sp[e]->second - sp[e]->first <= loc_snap_tol) continue;
    const auto [lo, hi] = *sp[e];
    double emin = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 16; ++j) {
      double d = lo + (hi - lo) * j / 17.0;
      emin = std::min(emin, consider(t.at_down(e, d)));
    }
    edge_rank.emplace_back(emin, e);
  }
  std::sort(edge_rank.begin(), edge_rank.end());

  if (p.is_inf()) {
    // the closed-form objective is convex piecewise-linear per edge
    if (!edge_rank.empty()) {
      EdgeId e = edge_rank.front().second;
      const auto [lo, hi] = *sp[e];
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = lo, b = hi;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = consider(t.at_down(e, x1));
      double f2 = consider(t.at_down(e, x2));
      const double tol = std::max(1e-12 * t.tree().edge(e).length, 1e-13);
      for (int it = 0; it < 80 && b - a > tol; ++it) {
        if (f1 <= f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = consider(t.at_down(e, x1));
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = consider(t.at_down(e, x2));
        }
      }
    }
  } else {
    // the rerooted objective is a staircase in x, constant between adjacent
    // cell midpoints; cell faces enumerate every tread, so sweeping them on
    // the leading edges is an exact minimization
    for (size_t r = 0; r < edge_rank.size() && r < 3; ++r) {
      if (edge_rank[r].first > edge_rank.front().first * 1.05) break;
      EdgeId e = edge_rank[r].second;
      const auto [lo, hi] = *sp[e];
      const auto& cells = g.edge_nodes[e];
      const int ncell = static_cast<int>(cells.size());
      const int stride = std::max(1, (ncell + 511) / 512);
      for (int ci = 0; ci < ncell; ci += stride) {
        const GridNode& nd = g.nodes[cells[ci]];
        double face = t.down(nd.loc) - 0.5 * nd.q;
        if (face > lo + loc_snap_tol && face < hi - loc_snap_tol) consider(t.at_down(e, face));
      }
    }
  }

  if (!p.is_inf() && p.p != 2.0) {
    // re-polish the winner with the full start set; its flag is the one
    // reported
    any_unconverged = false;
    first_eval = true;
    warm.clear();
    double val = objective(best.argmin);
    best.value = std::min(best.value, val);
    best.flagged = any_unconverged;
  }
  return best;
}

double min_norm_over_roots_rich(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                                const Subtree& k, PNorm p, const GridParams& prm) {
  if (p.is_inf()) return min_norm_over_roots(t, u, v, k, p, prm).value;
  double a1 = min_norm_over_roots(t, u, v, k, p, prm).value;
  double a2 = min_norm_over_roots(t, u, v, k, p, prm.doubled()).value;
  return (4.0 * a2 - a1) / 3.0;
}

// --- A(K) ------------------------------------------------------------------

namespace {

double delta_formula_p1(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                        const Subtree& k) {
  SpanMap sp = region_spans(t, k);
  std::vector<double> vsub = descendant_mass(t, v, sp);
  double vtot = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e)
    if (sp[e]) vtot += edge_clipped_mass(t, v, e, sp[e]->first, sp[e]->second);

  double best = 0.0;
  auto score = [&](double cu, double vin) { return cu * std::min(vin, vtot - vin); };
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    if (!sp[e] || sp[e]->second - sp[e]->first <= loc_snap_tol) continue;
    const auto [lo, hi] = *sp[e];
    // merge u and v breakpoints so both weights are constant per piece
    std::vector<double> bks{lo, hi};
    for (const StepWeight* w : {&u, &v}) {
      double cum = 0.0;
      for (const WeightSegment& s : down_segments(t, *w, e)) {
        cum += s.len;
        if (cum > lo + loc_snap_tol && cum < hi - loc_snap_tol) bks.push_back(cum);
      }
    }
    std::sort(bks.begin(), bks.end());
    bks.erase(std::unique(bks.begin(), bks.end(),
                          [](double x, double y) { return std::abs(x - y) <= loc_snap_tol; }),
              bks.end());
    for (size_t i = 0; i + 1 < bks.size(); ++i) {
      double d0 = bks[i], d1 = bks[i + 1];
      double mid = t.at_down(e, 0.5 * (d0 + d1)).offset;
      double cu = value_at(u, e, mid), cv = value_at(v, e, mid);
      if (cu <= 0.0) continue;
      double vin0 = edge_clipped_mass(t, v, e, d0, hi) + vsub[t.bottom_vertex(e)];
      double vin1 = vin0 - cv * (d1 - d0);
      best = std::max({best, score(cu, vin0), score(cu, vin1)});
      if (cv > 0.0) {
        double dstar = d0 + (vin0 - 0.5 * vtot) / cv;
        if (dstar > d0 && dstar < d1) best = std::max(best, cu * 0.5 * vtot);
      }
    }
  }
  return best;
}

}  // namespace

AValueResult a_value(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                     const Subtree& k, PNorm p, const GridParams& prm) {
  if (mu(t, v, p, k) <= 0.0) return {0.0, false, std::nullopt};
  if (p.is_one()) return {delta_formula_p1(t, u, v, k), true, std::nullopt};
  if (!p.is_inf() && p.p == 2.0) {
    QuadGrid g = build_grid(t, u, v, k, prm);
    return {deflated_top(g), false, std::nullopt};
  }
  RootScanResult rs = min_norm_over_roots(t, u, v, k, p, prm);
  return {rs.value, rs.flagged, rs.argmin};
}

double a_value_rich(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                    const Subtree& k, PNorm p, const GridParams& prm) {
  if (p.is_one() || p.is_inf()) return a_value(t, u, v, k, p, prm).value;
  double a1 = a_value(t, u, v, k, p, prm).value;
  double a2 = a_value(t, u, v, k, p, prm.doubled()).value;
  return (4.0 * a2 - a1) / 3.0;
}

double op_norm_rich(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                    const Subtree& k, PNorm p, const GridParams& prm) {
  if (p.is_one() || p.is_inf()) return op_norm(t, u, v, k, p, prm).value;
  double a1 = op_norm(t, u, v, k, p, prm).value;
  double a2 = op_norm(t, u, v, k, p, prm.doubled()).value;
  return (4.0 * a2 - a1) / 3.0;
}

// --- shift -----------------------------------------------------------------

ShiftResult argmin_shift(const DiscretizedOperator& op, const std::vector<double>& f) {
  const QuadGrid& g = op.grid;
  const int n = g.size();
  std::vector<double> tf = apply_chains(g, native_parents(g), f);
  std::vector<double> vvec(n);
  for (int i = 0; i < n; ++i) vvec[i] = g.nodes[i].v;
  if (!op.p.is_inf() && op.p.p == 2.0) {
    double den = qdot(g, vvec, vvec);
    if (den <= 0.0) return {0.0, true};
    return {qdot(g, tf, vvec) / den, false};
  }
  double nv = grid_norm(g, vvec, op.p);
  if (nv <= 0.0) return {0.0, true};
  double c = 2.000001 * grid_norm(g, tf, op.p) / nv + 1.0;
  auto phi = [&](double s) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = tf[i] - s * vvec[i];
    return grid_norm(g, r, op.p);
  };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -c, b = c;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  const double tol = 1e-10 * std::max(1.0, c);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = phi(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = phi(x2);
    }
  }
  return {0.5 * (a + b), false};
}

// --- finite-rank approximant -----------------------------------------------

FiniteRankApproximant finite_rank_approximant(const RootedTree& t, const StepWeight& u,
                                              const StepWeight& v, const Partition& parts,
                                              PNorm p, const GridParams& prm) {
  GridParams aligned = prm;
  for (const Subtree& part : parts.parts) {
    std::vector<Location> marks{part.anchor};
    marks.insert(marks.end(), part.cuts.begin(), part.cuts.end());
    for (const Location& m : marks) {
      Location c = t.canonical(m);
      aligned.extra_breaks.emplace_back(c.edge, t.down(c));
    }
  }

  FiniteRankApproximant fr;
  fr.grid = build_grid(t, u, v, parts.parent, aligned);
  const int n = fr.grid.size();
  const int np = static_cast<int>(parts.parts.size());
  fr.rank = np;
  fr.part_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int pi = 0; pi < np; ++pi)
      if (subtree_contains(t, parts.parts[pi], fr.grid.nodes[i].loc)) {
        fr.part_of[i] = pi;
        break;
      }
    if (fr.part_of[i] < 0) throw invalid_tree("partition does not cover its region");
  }
  fr.vmask.resize(n);
  for (int i = 0; i < n; ++i) fr.vmask[i] = fr.grid.nodes[i].v;

  // minimizing roots for the path-primitive form (finite p != 2)
  std::vector<std::optional<Location>> broot(np);
  const bool use_mu_average = !p.is_inf() && p.p == 2.0;
  if (!use_mu_average && !p.is_one()) {
    for (int pi = 0; pi < np; ++pi) {
      AValueResult av = a_value(t, u, v, parts.parts[pi], p, prm);
      broot[pi] = av.root;
    }
  }

  std::vector<int> par = native_parents(fr.grid);
  fr.coeffs.assign(np, std::vector<double>(n, 0.0));
  for (int pi = 0; pi < np; ++pi) {
    const Subtree& part = parts.parts[pi];
    Location anchor = t.canonical(part.anchor);
    std::vector<double>& c = fr.coeffs[pi];
    for (int j = 0; j < n; ++j) {
      const GridNode& nd = fr.grid.nodes[j];
      double uq = nd.u * nd.q;
      if (t.precedes(nd.loc, anchor)) c[j] += uq;
      if (fr.part_of[j] == pi && broot[pi] && t.precedes(nd.loc, *broot[pi])) c[j] += uq;
    }
    if (use_mu_average) {
      // s[j] = sum of v^2 q over part cells at or below j, via in-part links
      std::vector<double> s(n, 0.0);
      double mu_i = 0.0;
      for (int j = 0; j < n; ++j)
        if (fr.part_of[j] == pi) {
          s[j] = fr.grid.nodes[j].v * fr.grid.nodes[j].v * fr.grid.nodes[j].q;
          mu_i += s[j];
        }
      if (mu_i > 0.0) {
        std::vector<int> order = topo_order(par);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
          int j = *it;
          if (fr.part_of[j] == pi && par[j] >= 0 && fr.part_of[par[j]] == pi) s[par[j]] += s[j];
        }
        for (int j = 0; j < n; ++j)
          if (fr.part_of[j] == pi)
            c[j] += fr.grid.nodes[j].u * fr.grid.nodes[j].q * (s[j] / mu_i);
      }
    }
  }
  return fr;
}

std::vector<double> apply_approximant(const FiniteRankApproximant& fr,
                                      const std::vector<double>& f) {
  const int n = fr.grid.size();
  std::vector<double> scal(fr.coeffs.size(), 0.0);
  for (size_t pi = 0; pi < fr.coeffs.size(); ++pi) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fr.coeffs[pi][j] * f[j];
    scal[pi] = s;
  }
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) out[i] = fr.vmask[i] * scal[fr.part_of[i]];
  return out;
}

NormResult op_minus_approximant_norm(const FiniteRankApproximant& fr, PNorm p) {
  const QuadGrid& g = fr.grid;
  const int n = g.size();
  std::vector<int> par = native_parents(g);
  if (!p.is_inf() && p.p == 2.0) {
    std::vector<double> b = weighted_matrix(g, par);
    for (int i = 0; i < n; ++i) {
      const double s = std::sqrt(g.nodes[i].q) * g.nodes[i].v;
      const std::vector<double>& c = fr.coeffs[fr.part_of[i]];
      double* row = &b[static_cast<size_t>(i) * n];
      for (int j = 0; j < n; ++j) row[j] -= s * c[j] / std::sqrt(g.nodes[j].q);
    }
    return {top_singular_value(std::move(b), n, n), false};
  }
  if (p.is_one() || p.is_inf())
    throw unsupported_exponent("difference norm is computed for finite p > 1 only");
  auto ap = [&](const std::vector<double>& f) {
    std::vector<double> out = apply_chains(g, par, f);
    std::vector<double> pf = apply_approximant(fr, f);
    for (int i = 0; i < n; ++i) out[i] -= pf[i];
    return out;
  };
  auto adj = [&](const std::vector<double>& psi) {
    std::vector<double> out = apply_adjoint_chains(g, par, psi);
    std::vector<double> tpart(fr.coeffs.size(), 0.0);
    for (int i = 0; i < n; ++i) tpart[fr.part_of[i]] += g.nodes[i].q * fr.vmask[i] * psi[i];
    for (size_t pi = 0; pi < fr.coeffs.size(); ++pi)
      for (int j = 0; j < n; ++j) out[j] -= fr.coeffs[pi][j] * tpart[pi];
    return out;
  };
  AscentOutcome a = ascent_core(g, p, ap, adj, ascent_starts(g, par, 12, nullptr), 2000);
  return {a.value, !a.converged};
}

}  // namespace hardytree
