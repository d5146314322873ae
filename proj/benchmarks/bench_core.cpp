#include <benchmark/benchmark.h>

#include "hardytree/fixtures.hpp"
#include "hardytree/hardy_operator.hpp"
#include "hardytree/linalg.hpp"
#include "hardytree/partition.hpp"
#include "hardytree/sigma.hpp"

using namespace hardytree;

namespace {

struct Rooted {
  RootedTree rt;
  StepWeight u;
  StepWeight v;
};

Rooted rooted(const std::string& name) {
  Fixture fx = fixture_by_name(name);
  RootedTree rt = RootedTree::root_at(fx.tree, fx.root);
  return {rt, split_weight(fx.u, rt.split()), split_weight(fx.v, rt.split())};
}

GridParams grid(int per_edge) {
  GridParams g;
  g.per_edge = per_edge;
  return g;
}

void BM_discretize(benchmark::State& state) {
  Rooted r = rooted("y_sym");
  Subtree whole = whole_tree(r.rt);
  GridParams g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    DiscretizedOperator op = discretize(r.rt, r.u, r.v, whole, PNorm::of(2.0), g);
    benchmark::DoNotOptimize(op.grid.nodes.data());
  }
}
BENCHMARK(BM_discretize)->Arg(128)->Arg(512);

void BM_apply(benchmark::State& state) {
  Rooted r = rooted("b2");
  DiscretizedOperator op = discretize(r.rt, r.u, r.v, whole_tree(r.rt), PNorm::of(2.0),
                                      grid(static_cast<int>(state.range(0))));
  std::vector<double> f(op.grid.size(), 1.0);
  for (auto _ : state) {
    std::vector<double> y = hardytree::apply(op, f);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_apply)->Arg(64)->Arg(256);

void BM_top_singular_value(benchmark::State& state) {
  Rooted r = rooted("interval");
  DiscretizedOperator op = discretize(r.rt, r.u, r.v, whole_tree(r.rt), PNorm::of(2.0),
                                      grid(static_cast<int>(state.range(0))));
  std::vector<double> mat = weighted_matrix(op.grid);
  const int n = op.grid.size();
  for (auto _ : state) {
    std::vector<double> copy = mat;
    benchmark::DoNotOptimize(top_singular_value(std::move(copy), n, n));
  }
}
BENCHMARK(BM_top_singular_value)->Arg(128)->Arg(256);

void BM_a_value(benchmark::State& state) {
  Rooted r = rooted("y_sym");
  Subtree whole = whole_tree(r.rt);
  GridParams g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(a_value(r.rt, r.u, r.v, whole, PNorm::of(2.0), g).value);
}
BENCHMARK(BM_a_value)->Arg(64)->Arg(128);

void BM_greedy_partition(benchmark::State& state) {
  Rooted r = rooted("path04");
  Subtree whole = whole_tree(r.rt);
  AEvalParams ap;
  ap.grid = grid(48);
  ap.grid.min_nodes = 64;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        eps_partition(r.rt, r.u, r.v, whole, PNorm::of(2.0), 0.3, ap).count);
}
BENCHMARK(BM_greedy_partition);

void BM_sigma_table(benchmark::State& state) {
  Rooted r = rooted("b2");
  for (auto _ : state) {
    SigmaTable t = sigma_table(r.rt, r.u, r.v, PNorm::of(2.0));
    benchmark::DoNotOptimize(t.bands.data());
  }
}
BENCHMARK(BM_sigma_table);

}  // namespace

BENCHMARK_MAIN();
