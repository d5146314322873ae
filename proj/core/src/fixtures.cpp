#include "hardytree/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace hardytree {

namespace {

// Two levels of a full binary topology rooted at vertex 0, generation g
// getting edge length elen(g) and weight value vval(g). Generation numbers
// start at 1.
template <typename LenF, typename ValF>
Fixture binary_like(std::string name, int generations, LenF elen, ValF vval) {
  std::vector<Edge> edges;
  std::vector<std::vector<WeightSegment>> vsegs;
  std::vector<int> frontier{0};
  int next_vertex = 1;
  double uv = 0.0;
  for (int g = 1; g <= generations; ++g) {
    std::vector<int> next;
    for (int parent : frontier) {
      for (int c = 0; c < 2; ++c) {
        edges.push_back(Edge{parent, next_vertex, elen(g)});
        vsegs.push_back({WeightSegment{elen(g), vval(g)}});
        uv += elen(g) * vval(g);
        next.push_back(next_vertex++);
      }
    }
    frontier = std::move(next);
  }
  MetricTree t(next_vertex, edges);
  Fixture f{std::move(name), t, StepWeight::constant(t, 1.0), StepWeight{std::move(vsegs)},
            Location{0, 0.0}, uv};
  return f;
}

}  // namespace

Fixture fixture_interval() {
  MetricTree t(2, {Edge{0, 1, 1.0}});
  return {"interval", t, StepWeight::constant(t, 1.0), StepWeight::constant(t, 1.0),
          Location{0, 0.0}, 1.0};
}

Fixture fixture_path04() {
  MetricTree t(5, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}, Edge{2, 3, 1.0}, Edge{3, 4, 1.0}});
  return {"path04", t, StepWeight::constant(t, 1.0), StepWeight::constant(t, 1.0),
          Location{0, 0.0}, 4.0};
}

Fixture fixture_y_sym() {
  MetricTree t(4, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}, Edge{1, 3, 1.0}});
  return {"y_sym", t, StepWeight::constant(t, 1.0), StepWeight::constant(t, 1.0),
          Location{0, 0.0}, 3.0};
}

Fixture fixture_binary3() {
  return binary_like("binary3", 3, [](int) { return 1.0; },
                     [](int g) { return std::pow(0.5, g - 1); });
}

Fixture fixture_b2() {
  return binary_like("b2", 3, [](int g) { return std::pow(2.0, g); },
                     [](int g) { return std::pow(0.5, g); });
}

std::vector<Fixture> all_fixtures() {
  return {fixture_interval(), fixture_path04(), fixture_y_sym(), fixture_binary3(),
          fixture_b2()};
}

Fixture fixture_by_name(const std::string& name) {
  for (Fixture& f : all_fixtures())
    if (f.name == name) return std::move(f);
  throw std::out_of_range("unknown fixture: " + name);
}

}  // namespace hardytree
