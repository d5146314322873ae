#include "hardytree/weights.hpp"

#include <algorithm>
#include <cmath>

namespace hardytree {

namespace {

// Apply fn(value, len) to each maximal constant piece of segs (down-oriented)
// intersected with [lo, hi].
template <typename Fn>
void for_each_piece(const std::vector<WeightSegment>& segs, double lo, double hi, Fn&& fn) {
  double cursor = 0.0;
  for (const WeightSegment& s : segs) {
    double a = std::max(lo, cursor);
    double b = std::min(hi, cursor + s.len);
    if (b > a) fn(s.value, b - a);
    cursor += s.len;
    if (cursor >= hi) break;
  }
}

}  // namespace

StepWeight StepWeight::constant(const MetricTree& t, double value) {
  StepWeight w;
  w.per_edge.resize(t.edge_count());
  for (EdgeId e = 0; e < t.edge_count(); ++e)
    w.per_edge[e] = {WeightSegment{t.edge(e).length, value}};
  return w;
}

void StepWeight::validate(const MetricTree& t) const {
  if (static_cast<int>(per_edge.size()) != t.edge_count())
    throw invalid_weight("weight edge count mismatch");
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    double sum = 0.0;
    for (const WeightSegment& s : per_edge[e]) {
      if (!(s.len > 0.0)) throw invalid_weight("weight segment length must be positive");
      if (s.value < 0.0 || !std::isfinite(s.value))
        throw invalid_weight("weight values must be nonnegative and finite");
      sum += s.len;
    }
    if (std::abs(sum - t.edge(e).length) > 1e-9)
      throw invalid_weight("weight segment lengths on edge " + std::to_string(e) +
                           " do not sum to the edge length");
  }
}

PNorm PNorm::of(double p) {
  if (!(p >= 1.0)) throw unsupported_exponent("p must lie in [1, inf]");
  return PNorm{p};
}

double PNorm::conjugate() const {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double value_at(const StepWeight& w, EdgeId e, double offset) {
  const auto& segs = w.per_edge[e];
  double cursor = 0.0;
  for (const WeightSegment& s : segs) {
    cursor += s.len;
    if (offset < cursor) return s.value;
  }
  return segs.empty() ? 0.0 : segs.back().value;
}

std::vector<WeightSegment> down_segments(const RootedTree& t, const StepWeight& w, EdgeId e) {
  std::vector<WeightSegment> segs = w.per_edge[e];
  bool top_is_from = t.top_vertex(e) == t.tree().edge(e).from;
  if (!top_is_from) std::reverse(segs.begin(), segs.end());
  return segs;
}

double lp_norm(const RootedTree& t, const StepWeight& w, PNorm p, const Subtree& k) {
  if (p.is_inf()) {
    double m = 0.0;
    for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
      auto sp = kept_span(t, k, e);
      if (!sp || sp->second - sp->first <= 0.0) continue;
      for_each_piece(down_segments(t, w, e), sp->first, sp->second,
                     [&](double v, double) { m = std::max(m, v); });
    }
    return m;
  }
  double acc = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    if (auto sp = kept_span(t, k, e))
      for_each_piece(down_segments(t, w, e), sp->first, sp->second,
                     [&](double v, double len) { acc += std::pow(v, p.p) * len; });
  }
  return std::pow(acc, 1.0 / p.p);
}

double mu(const RootedTree& t, const StepWeight& v, PNorm p, const Subtree& k) {
  const double expo = p.is_inf() ? 1.0 : p.p;
  double acc = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    if (auto sp = kept_span(t, k, e))
      for_each_piece(down_segments(t, v, e), sp->first, sp->second,
                     [&](double val, double len) { acc += std::pow(val, expo) * len; });
  }
  return acc;
}

double product_integral(const RootedTree& t, const StepWeight& u, const StepWeight& v,
                        const Subtree& k) {
  double acc = 0.0;
  for (EdgeId e = 0; e < t.tree().edge_count(); ++e) {
    auto sp = kept_span(t, k, e);
    if (!sp) continue;
    auto us = down_segments(t, u, e);
    auto vs = down_segments(t, v, e);
    // merge breakpoints of the two step functions
    size_t i = 0, j = 0;
    double ucur = 0.0, vcur = 0.0, pos = 0.0;
    while (i < us.size() && j < vs.size()) {
      double uend = ucur + us[i].len, vend = vcur + vs[j].len;
      double end = std::min(uend, vend);
      double a = std::max(sp->first, pos), b = std::min(sp->second, end);
      if (b > a) acc += us[i].value * vs[j].value * (b - a);
      pos = end;
      if (uend <= end + 1e-15) {
        ucur = uend;
        ++i;
      }
      if (vend <= end + 1e-15) {
        vcur = vend;
        ++j;
      }
    }
  }
  return acc;
}

double primitive_U(const RootedTree& t, const StepWeight& u, PNorm p, Location x) {
  const double q = p.conjugate();
  if (std::isinf(q))
    throw unsupported_exponent("U(x) requires p > 1 (finite conjugate exponent)");
  double acc = 0.0;
  for (const auto& [e, a, b] : t.path(t.vertex_location(t.root()), x)) {
    double lo = std::min(a, b), hi = std::max(a, b);
    // from-oriented traversal of the stored segments
    double cursor = 0.0;
    for (const WeightSegment& s : u.per_edge[e]) {
      double pa = std::max(lo, cursor), pb = std::min(hi, cursor + s.len);
      if (pb > pa) acc += std::pow(s.value, q) * (pb - pa);
      cursor += s.len;
    }
  }
  return acc;
}

std::vector<WeightSegment> rearrange_desc(std::vector<WeightSegment> segs) {
  std::stable_sort(segs.begin(), segs.end(),
                   [](const WeightSegment& a, const WeightSegment& b) { return a.value > b.value; });
  return segs;
}

double rearrangement_sup_t(const std::vector<WeightSegment>& segs) {
  auto sorted = rearrange_desc(segs);
  double cum = 0.0, best = 0.0;
  for (const WeightSegment& s : sorted) {
    cum += s.len;
    best = std::max(best, s.value * cum);
  }
  return best;
}

double local_ess_sup(const RootedTree& t, const StepWeight& w, Location x) {
  Location cx = t.canonical(x);
  auto germ_value = [&](EdgeId e, double off) {
    // max of the segment values meeting the point (e, off)
    const auto& segs = w.per_edge[e];
    double cursor = 0.0, m = 0.0;
    for (const WeightSegment& s : segs) {
      double lo = cursor, hi = cursor + s.len;
      if (off >= lo - loc_snap_tol && off <= hi + loc_snap_tol) m = std::max(m, s.value);
      cursor = hi;
    }
    return m;
  };
  if (auto v = t.tree().vertex_at(cx)) {
    double m = 0.0;
    for (EdgeId e : t.tree().incident(*v)) {
      double off = (t.tree().edge(e).from == *v) ? 0.0 : t.tree().edge(e).length;
      m = std::max(m, germ_value(e, off));
    }
    return m;
  }
  return germ_value(cx.edge, cx.offset);
}

StepWeight split_weight(const StepWeight& w, const SplitRecord& rec) {
  if (!rec.did_split) return w;
  StepWeight out = w;
  const auto& segs = w.per_edge[rec.original_edge];
  std::vector<WeightSegment> upper, lower;
  double cursor = 0.0;
  for (const WeightSegment& s : segs) {
    double lo = cursor, hi = cursor + s.len;
    if (hi <= rec.at_offset + loc_snap_tol && !(lo >= rec.at_offset - loc_snap_tol)) {
      upper.push_back(s);
    } else if (lo >= rec.at_offset - loc_snap_tol) {
      lower.push_back(s);
    } else {
      upper.push_back(WeightSegment{rec.at_offset - lo, s.value});
      lower.push_back(WeightSegment{hi - rec.at_offset, s.value});
    }
    cursor = hi;
  }
  out.per_edge[rec.original_edge] = std::move(upper);
  out.per_edge.resize(std::max<size_t>(out.per_edge.size(), rec.new_edge + 1));
  out.per_edge[rec.new_edge] = std::move(lower);
  return out;
}

}  // namespace hardytree
