// Microbenchmarks for the hot paths: normalized sparse propagation, pairwise
// similarity scoring, kNN graph construction, and a full training epoch.
#include <benchmark/benchmark.h>

#include "de2gnn/gnn.hpp"
#include "de2gnn/purify.hpp"
#include "de2gnn/synth.hpp"

namespace {

using namespace de2gnn;

const Dataset& bench_dataset() {
  static Dataset ds = [] {
    SynthProfile p;
    p.name = "bench";
    p.num_nodes = 1500;
    p.num_edges = 3000;
    p.num_features = 800;
    p.num_classes = 6;
    p.seed = 99;
    return make_synthetic_dataset(p);
  }();
  return ds;
}

void BM_AdjPropagate(benchmark::State& state) {
  const Dataset& ds = bench_dataset();
  NormalizedAdjacency adj = normalized_adjacency(ds.graph);
  DenseMatrix h(ds.graph.num_nodes(), 64);
  Rng rng(1);
  for (auto& v : h.data) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    DenseMatrix out = adj_matmul(adj, h);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_AdjPropagate);

void BM_SimilarityRow(benchmark::State& state) {
  const Dataset& ds = bench_dataset();
  SimilarityIndex index(ds.features, SimilarityMode::jaccard);
  std::vector<double> scores(ds.graph.num_nodes());
  NodeId u = 0;
  for (auto _ : state) {
    index.scores_for(u, scores);
    benchmark::DoNotOptimize(scores.data());
    u = (u + 1) % ds.graph.num_nodes();
  }
}
BENCHMARK(BM_SimilarityRow);

void BM_KnnGraph(benchmark::State& state) {
  const Dataset& ds = bench_dataset();
  for (auto _ : state) {
    Graph g = build_knn_graph(ds.features, 5, SimilarityMode::cosine);
    benchmark::DoNotOptimize(g.num_edges());
  }
}
BENCHMARK(BM_KnnGraph);

void BM_TrainEpoch(benchmark::State& state) {
  const Dataset& ds = bench_dataset();
  TrainConfig cfg;
  cfg.max_epochs = static_cast<int>(state.range(0));
  cfg.patience = cfg.max_epochs;
  for (auto _ : state) {
    GcnTrainResult r = train_gcn(ds.graph, ds.features, ds.labels, ds.splits, cfg, 7);
    benchmark::DoNotOptimize(r.best_val_acc);
  }
}
BENCHMARK(BM_TrainEpoch)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
