#include "de2gnn/augment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "de2gnn/errors.hpp"

namespace de2gnn {

SurrogateOutput train_surrogate(const Graph& g, const FeatureMatrix& x, const LabelVector& labels,
                                const SplitMasks& splits, const TrainConfig& cfg,
                                std::uint64_t seed) {
  const GcnTrainResult trained = train_gcn(g, x, labels, splits, cfg, seed);
  const NormalizedAdjacency adj = normalized_adjacency(g);
  const CsrMatrix xs = csr_from_dense(x.values);
  SurrogateOutput out;
  out.probs = predict_gcn(trained.params, adj, xs).probs;
  return out;
}

AugmentResult add_homophilic_links(const Graph& g, const SurrogateOutput& surrogate,
                                   const LabelVector& labels, std::span<const NodeId> train_mask,
                                   std::span<const NodeId> tails, const AugmentConfig& cfg) {
  if (cfg.p < 0) throw ConfigError("add_homophilic_links: p must be >= 0");
  const NodeId n = g.num_nodes();
  if (surrogate.probs.rows != n)
    throw DataError("add_homophilic_links: surrogate row count does not match graph");

  std::vector<char> in_train(static_cast<std::size_t>(n), 0);
  for (NodeId v : train_mask) in_train[static_cast<std::size_t>(v)] = 1;

  AugmentResult out;
  std::set<EdgePair> chosen;
  std::vector<NodeId> order(static_cast<std::size_t>(n));

  for (NodeId v : tails) {
    const double* zv = surrogate.probs.row(v);
    int cls = 0;
    double conf = zv[0];
    for (int c = 1; c < surrogate.probs.cols; ++c) {
      if (zv[c] > conf) {
        conf = zv[c];
        cls = c;
      }
    }
    if (!(conf > cfg.t2)) continue;
    if (in_train[static_cast<std::size_t>(v)]) cls = labels.labels[v];

    // rank every non-adjacent other node by its probability for cls
    std::iota(order.begin(), order.end(), 0);
    auto disallowed = [&](NodeId q) { return q == v || g.has_edge(v, q); };
    auto end = std::remove_if(order.begin(), order.end(), disallowed);
    const auto count = std::min<std::ptrdiff_t>(cfg.p, end - order.begin());
    std::partial_sort(order.begin(), order.begin() + count, end, [&](NodeId a, NodeId b) {
      const double sa = surrogate.probs.at(a, cls);
      const double sb = surrogate.probs.at(b, cls);
      if (sa != sb) return sa > sb;
      return a < b;
    });
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const NodeId q = order[static_cast<std::size_t>(i)];
      EdgePair e{std::min(v, q), std::max(v, q)};
      if (chosen.insert(e).second)
        out.added.push_back({v, q, surrogate.probs.at(q, cls)});
    }
  }
  std::vector<EdgePair> edges;
  edges.reserve(chosen.size());
  for (const auto& e : chosen) edges.push_back(e);
  out.graph = g.with_edges_added(edges);
  return out;
}

void write_added_edges(const std::vector<AddedEdge>& added, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  char buf[32];
  for (const auto& e : added) {
    std::snprintf(buf, sizeof buf, "%.6f", e.score);
    out << e.u << '\t' << e.v << '\t' << buf << '\n';
  }
}

}  // namespace de2gnn
