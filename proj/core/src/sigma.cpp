#include "hardytree/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace hardytree {

namespace {

struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool reaches_bottom = false;  // U stays under the band's upper threshold
};

int find_root(std::vector<int>& uf, int x) {
  while (uf[x] != x) {
    uf[x] = uf[uf[x]];
    x = uf[x];
  }
  return x;
}

void unite(std::vector<int>& uf, int a, int b) {
  uf[find_root(uf, a)] = find_root(uf, b);
}

// First down-coordinate where the cumulative integral of u^{pc} from the edge
// top reaches `target`; the caller guarantees the edge total reaches it.
double crossing_down(const std::vector<WeightSegment>& segs, double start_u, double target) {
  double acc = start_u;
  double d = 0.0;
  for (const auto& s : segs) {
    double gain = s.value * s.len;
    if (acc + gain >= target) {
      if (s.value <= 0.0) return d;  // plateau already at the target
      return d + (target - acc) / s.value;
    }
    acc += gain;
    d += s.len;
  }
  return d;
}

double clipped_mass(const std::vector<WeightSegment>& segs, double lo, double hi) {
  double acc = 0.0;
  double d = 0.0;
  for (const auto& s : segs) {
    double a = std::max(lo, d);
    double b = std::min(hi, d + s.len);
    if (b > a) acc += s.value * (b - a);
    d += s.len;
  }
  return acc;
}

std::vector<WeightSegment> powered(const std::vector<WeightSegment>& segs, double q) {
  std::vector<WeightSegment> out = segs;
  for (auto& s : out) s.value = std::pow(std::abs(s.value), q);
  return out;
}

double weak_lq_of(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end(), std::greater<double>());
  double best = 0.0;
  for (size_t j = 0; j < xs.size(); ++j)
    best = std::max(best, std::pow(double(j + 1), 1.0 / q) * xs[j]);
  return best;
}

double lq_of(const std::vector<double>& xs, double q) {
  double acc = 0.0;
  for (double x : xs) acc += std::pow(x, q);
  return std::pow(acc, 1.0 / q);
}

}  // namespace

double SigmaTable::sup_sigma() const {
  double best = 0.0;
  for (const auto& b : bands)
    for (const auto& c : b.components) best = std::max(best, c.sigma);
  return best;
}

double SigmaTable::lq_components(double q) const {
  double acc = 0.0;
  for (const auto& b : bands)
    for (const auto& c : b.components) acc += std::pow(c.sigma, q);
  return std::pow(acc, 1.0 / q);
}

double SigmaTable::lq_bands(double q) const {
  double acc = 0.0;
  for (const auto& b : bands) acc += std::pow(b.sigma, q);
  return std::pow(acc, 1.0 / q);
}

double SigmaTable::lq_weighted(double q) const {
  double pc = PNorm::of(p).conjugate();
  double acc = 0.0;
  for (const auto& b : bands)
    for (const auto& c : b.components)
      acc += std::pow(std::pow(double(c.boundary_count), 1.0 / pc) * c.sigma, q);
  return std::pow(acc, 1.0 / q);
}

double SigmaTable::weak_lq_components(double q) const {
  std::vector<double> xs;
  for (const auto& b : bands)
    for (const auto& c : b.components) xs.push_back(c.sigma);
  return weak_lq_of(std::move(xs), q);
}

double SigmaTable::weak_lq_weighted_bands(double q) const {
  double pc = PNorm::of(p).conjugate();
  std::vector<double> xs;
  for (const auto& b : bands) {
    double nk = 0.0;
    for (const auto& c : b.components)
      nk += std::pow(double(c.boundary_count), 1.0 / pc) * c.sigma;
    xs.push_back(nk);
  }
  return weak_lq_of(std::move(xs), q);
}

SigmaTable sigma_table(const RootedTree& t, const StepWeight& u, const StepWeight& v, PNorm p) {
  if (p.is_one() || p.is_inf())
    throw unsupported_exponent("sigma bands need a finite exponent pair");
  const double pp = p.p;
  const double pc = p.conjugate();

  SigmaTable table;
  table.p = pp;

  const int ne = t.tree().edge_count();
  std::vector<std::vector<WeightSegment>> usegs(ne), vsegs(ne);
  std::vector<double> u_top(ne, 0.0), u_bot(ne, 0.0);
  for (EdgeId e : t.preorder_edges()) {
    usegs[e] = powered(down_segments(t, u, e), pc);
    vsegs[e] = powered(down_segments(t, v, e), pp);
    EdgeId pe = t.parent_edge(t.top_vertex(e));
    u_top[e] = pe >= 0 ? u_bot[pe] : 0.0;
    double gain = 0.0;
    for (const auto& s : usegs[e]) gain += s.value * s.len;
    u_bot[e] = u_top[e] + gain;
  }

  double u_max = 0.0;
  for (EdgeId e : t.preorder_edges()) u_max = std::max(u_max, u_bot[e]);
  if (u_max <= 0.0) return table;

  double mu_total = mu(t, v, p, whole_tree(t));

  // Largest k whose lower threshold 2^{k pc/pp} still meets the range of U.
  int k_hi = int(std::floor(std::log2(u_max) * pp / pc));
  while (std::exp2(double(k_hi + 1) * pc / pp) <= u_max) ++k_hi;
  while (std::exp2(double(k_hi) * pc / pp) > u_max) --k_hi;

  for (int k = k_hi; k > k_hi - 80; --k) {
    const double lo_thr = std::exp2(double(k) * pc / pp);
    const double hi_thr = std::exp2(double(k + 1) * pc / pp);

    std::vector<char> present(ne, 0);
    std::vector<BandInterval> iv(ne);
    for (EdgeId e : t.preorder_edges()) {
      if (!(u_top[e] < hi_thr && u_bot[e] >= lo_thr)) continue;
      BandInterval b;
      b.lo = u_top[e] >= lo_thr ? 0.0 : crossing_down(usegs[e], u_top[e], lo_thr);
      if (u_bot[e] < hi_thr) {
        b.hi = t.tree().edge(e).length;
        b.reaches_bottom = true;
      } else {
        b.hi = crossing_down(usegs[e], u_top[e], hi_thr);
      }
      if (b.hi < b.lo) continue;
      present[e] = 1;
      iv[e] = b;
    }

    std::vector<int> uf(ne);
    std::iota(uf.begin(), uf.end(), 0);
    std::map<VertexId, EdgeId> sibling_anchor;
    for (EdgeId f : t.preorder_edges()) {
      if (!present[f] || iv[f].lo != 0.0) continue;
      VertexId vx = t.top_vertex(f);
      EdgeId pe = t.parent_edge(vx);
      if (pe >= 0 && present[pe] && iv[pe].reaches_bottom) unite(uf, pe, f);
      auto it = sibling_anchor.find(vx);
      if (it != sibling_anchor.end())
        unite(uf, it->second, f);
      else
        sibling_anchor[vx] = f;
    }

    std::map<int, std::vector<EdgeId>> comps;
    for (EdgeId e : t.preorder_edges())
      if (present[e]) comps[find_root(uf, e)].push_back(e);

    SigmaBand band;
    band.k = k;
    for (auto& [rep, edges] : comps) {
      SigmaComponent c;
      EdgeId top_edge = -1;
      double top_depth = 0.0;
      for (EdgeId e : edges) {
        c.mu += clipped_mass(vsegs[e], iv[e].lo, iv[e].hi);
        double d = t.vertex_depth(t.top_vertex(e)) + iv[e].lo;
        if (top_edge < 0 || d < top_depth) {
          top_edge = e;
          top_depth = d;
        }
      }
      band.mu_total += c.mu;
      if (!(c.mu > 0.0)) continue;  // closure artifacts and v-free stretches

      c.sigma = std::pow(std::ldexp(c.mu, k), 1.0 / pp);

      Location zeta = t.canonical(t.at_down(top_edge, iv[top_edge].lo));
      std::vector<Location> tips;
      std::vector<Location> cuts;
      for (EdgeId e : edges) {
        if (iv[e].reaches_bottom) {
          VertexId vx = t.bottom_vertex(e);
          if (t.child_edges(vx).empty()) tips.push_back(t.at_down(e, iv[e].hi));
        } else {
          Location c0 = t.at_down(e, iv[e].hi);
          tips.push_back(c0);
          cuts.push_back(c0);
        }
      }
      tips.push_back(zeta);
      int distinct = 0;
      for (size_t i = 0; i < tips.size(); ++i) {
        bool dup = false;
        for (size_t j = 0; j < i && !dup; ++j) dup = t.same_point(tips[i], tips[j]);
        if (!dup) ++distinct;
      }
      c.boundary_count = distinct - 1;

      Subtree region;
      region.cuts = cuts;
      if (auto vx = t.tree().vertex_at(zeta); vx && *vx != t.root()) {
        region.anchor = t.vertex_location(*vx);
        for (EdgeId e : edges)
          if (iv[e].lo == 0.0 && t.top_vertex(e) == *vx) region.branches.push_back(e);
      } else if (auto vx2 = t.tree().vertex_at(zeta); vx2 && *vx2 == t.root()) {
        region.anchor = t.vertex_location(*vx2);
      } else {
        region.anchor = zeta;
      }
      c.region = region;

      band.components.push_back(std::move(c));
    }
    band.sigma = std::pow(std::ldexp(band.mu_total, k), 1.0 / pp);
    table.sigma_p_mass += std::ldexp(band.mu_total, k);
    table.bands.push_back(std::move(band));
    table.k_floor = k;

    double tail_bound = std::ldexp(mu_total, k);  // sum_{j<k} 2^j mu(Z_j) <= 2^k mu_total
    if (table.sigma_p_mass > 0.0 && tail_bound < 1e-12 * table.sigma_p_mass) {
      table.truncated = true;
      table.dropped_mass_bound = tail_bound;
      break;
    }
  }

  std::reverse(table.bands.begin(), table.bands.end());
  return table;
}

BoundCheckReport lq_bound_checks(const std::vector<double>& approx_numbers,
                                 const SigmaTable& table, double op_norm_value,
                                 const std::vector<std::pair<double, int>>& eps_packing_counts,
                                 PNorm p) {
  BoundCheckReport rep;
  const double pp = p.p;
  auto push = [&rep](std::string name, double lhs, double rhs, bool asserted, double slack) {
    BoundCheckRow row;
    row.name = std::move(name);
    row.lhs = lhs;
    row.rhs = rhs;
    row.ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    row.asserted = asserted;
    row.pass = asserted ? lhs <= rhs + slack : std::isfinite(row.ratio);
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  };

  push("sup_sigma_le_norm", table.sup_sigma(), op_norm_value, true,
       1e-9 * std::max(1.0, op_norm_value));

  const double c_expl = std::exp2(2.0 / pp + 2.0);
  for (double q : {1.0, 2.0}) {
    if (q > pp) continue;  // the explicit-constant branch needs q <= p
    double rhs = std::pow(table.lq_weighted(q), q) * std::pow(c_expl, q);
    for (auto [eps, m] : eps_packing_counts) {
      push("packing_q" + std::to_string(int(q)) + "_eps" + std::to_string(eps),
           std::pow(eps, q) * double(m), rhs, true, 1e-9 * std::max(1.0, rhs));
    }
  }

  auto seq_lq = [&](double q) { return lq_of(approx_numbers, q); };
  auto seq_weak = [&](double q) {
    std::vector<double> xs = approx_numbers;
    return weak_lq_of(std::move(xs), q);
  };

  {
    double q = std::min(2.0, pp);
    push("ratio_an_lq_vs_weighted_q" + std::to_string(q), seq_lq(q), table.lq_weighted(q), false, 0.0);
  }
  {
    double q = pp + 1.0;
    push("ratio_an_lq_vs_bands_q" + std::to_string(q), seq_lq(q), table.lq_bands(q), false, 0.0);
  }
  {
    double q = std::min(2.0, pp);
    push("ratio_weak_an_vs_weighted_bands_q" + std::to_string(q), seq_weak(q),
         table.weak_lq_weighted_bands(q), false, 0.0);
    std::vector<double> band_sigmas;
    for (const auto& b : table.bands) band_sigmas.push_back(b.sigma);
    push("ratio_weak_an_vs_bands_q" + std::to_string(pp + 1.0), seq_weak(pp + 1.0),
         weak_lq_of(std::move(band_sigmas), pp + 1.0), false, 0.0);
  }
  {
    double q = 2.0;
    push("ratio_sigma_vs_an_q" + std::to_string(q), table.lq_components(q), seq_lq(q), false, 0.0);
  }
  return rep;
}

}  // namespace hardytree
