#include "de2gnn/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "de2gnn/errors.hpp"

using json = nlohmann::ordered_json;

namespace de2gnn {

AttackBudget make_budget(double rate, std::int64_t num_clean_edges) {
  if (rate < 0.0) throw ConfigError("attack rate must be >= 0");
  AttackBudget b;
  b.rate = rate;
  b.delta = std::llround(rate * static_cast<double>(num_clean_edges));
  return b;
}

std::pair<Graph, PerturbationRecord> load_perturbed_graph(const Dataset& ds,
                                                          const std::string& path) {
  const NodeId n = ds.graph.num_nodes();
  Graph perturbed = Graph::from_edges(n, read_edge_file(path, n));

  const auto clean = ds.graph.edge_list();
  const auto dirty = perturbed.edge_list();
  PerturbationRecord rec;
  rec.source = "external_file";
  std::set_difference(dirty.begin(), dirty.end(), clean.begin(), clean.end(),
                      std::back_inserter(rec.added));
  std::set_difference(clean.begin(), clean.end(), dirty.begin(), dirty.end(),
                      std::back_inserter(rec.removed));
  rec.rate = ds.graph.num_edges() == 0
                 ? 0.0
                 : static_cast<double>(rec.added.size() + rec.removed.size()) /
                       static_cast<double>(ds.graph.num_edges());
  if (rec.added.empty() && rec.removed.empty())
    warn("perturbed graph " + path + " is identical to the clean graph");
  return {std::move(perturbed), std::move(rec)};
}

std::pair<Graph, PerturbationRecord> heuristic_attack(const Dataset& ds,
                                                      const AttackBudget& budget,
                                                      const TrainConfig& surrogate_cfg,
                                                      SimilarityMode mode, std::uint64_t seed) {
  const NodeId n = ds.graph.num_nodes();
  PerturbationRecord rec;
  rec.source = "heuristic";
  if (budget.delta == 0) {
    rec.rate = 0.0;
    return {ds.graph, std::move(rec)};
  }

  // labels the attacker works with: ground truth on train, surrogate
  // predictions elsewhere
  std::vector<int> attack_labels(ds.labels.labels);
  {
    const GcnTrainResult sur =
        train_gcn(ds.graph, ds.features, ds.labels, ds.splits, surrogate_cfg, seed);
    const NormalizedAdjacency adj = normalized_adjacency(ds.graph);
    const CsrMatrix xs = csr_from_dense(ds.features.values);
    const std::vector<int> predicted = predict_gcn(sur.params, adj, xs).labels;
    std::vector<char> in_train(static_cast<std::size_t>(n), 0);
    for (NodeId v : ds.splits.train) in_train[static_cast<std::size_t>(v)] = 1;
    for (NodeId v = 0; v < n; ++v)
      if (!in_train[static_cast<std::size_t>(v)])
        attack_labels[static_cast<std::size_t>(v)] = predicted[static_cast<std::size_t>(v)];
  }

  // similarity threshold: median over clean edges
  std::vector<double> clean_sims;
  clean_sims.reserve(static_cast<std::size_t>(ds.graph.num_edges()));
  for (const auto& [u, v] : ds.graph.edge_list())
    clean_sims.push_back(edge_similarity(ds.features, u, v, mode));
  if (clean_sims.empty()) throw DataError("heuristic_attack: clean graph has no edges");
  std::sort(clean_sims.begin(), clean_sims.end());
  const std::size_t mid = clean_sims.size() / 2;
  const double median = clean_sims.size() % 2 == 1
                            ? clean_sims[mid]
                            : 0.5 * (clean_sims[mid - 1] + clean_sims[mid]);

  // candidate pool: non-edges with differing attack labels and similarity
  // strictly below the median
  SimilarityIndex index(ds.features, mode);
  std::vector<double> scores;
  std::vector<std::uint64_t> pool;
  for (NodeId u = 0; u < n; ++u) {
    index.scores_for(u, scores);
    const int lu = attack_labels[static_cast<std::size_t>(u)];
    for (NodeId v = u + 1; v < n; ++v) {
      if (attack_labels[static_cast<std::size_t>(v)] == lu) continue;
      if (!(scores[static_cast<std::size_t>(v)] < median)) continue;
      if (ds.graph.has_edge(u, v)) continue;
      pool.push_back((static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v));
    }
  }
  if (static_cast<std::int64_t>(pool.size()) < budget.delta)
    throw DataError("heuristic_attack: candidate pool (" + std::to_string(pool.size()) +
                    ") smaller than budget (" + std::to_string(budget.delta) + ")");

  // partial Fisher-Yates: first delta entries are the sample
  Rng rng(seed);
  const std::size_t delta = static_cast<std::size_t>(budget.delta);
  for (std::size_t i = 0; i < delta; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size() - i)));
    std::swap(pool[i], pool[j]);
  }
  rec.added.reserve(delta);
  for (std::size_t i = 0; i < delta; ++i) {
    rec.added.emplace_back(static_cast<NodeId>(pool[i] >> 32),
                           static_cast<NodeId>(pool[i] & 0xffffffffu));
  }
  std::sort(rec.added.begin(), rec.added.end());
  rec.rate = static_cast<double>(rec.added.size()) / static_cast<double>(ds.graph.num_edges());
  Graph attacked = ds.graph.with_edges_added(rec.added);
  return {std::move(attacked), std::move(rec)};
}

void write_perturbation_json(const PerturbationRecord& rec, double requested_rate,
                             const std::string& path) {
  json j;
  j["source"] = rec.source;
  j["requested_rate"] = requested_rate;
  j["rate"] = rec.rate;
  j["num_added"] = rec.added.size();
  j["num_removed"] = rec.removed.size();
  json added = json::array();
  for (const auto& [u, v] : rec.added) added.push_back({u, v});
  json removed = json::array();
  for (const auto& [u, v] : rec.removed) removed.push_back({u, v});
  j["added"] = std::move(added);
  j["removed"] = std::move(removed);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

double mean_edge_similarity(const Graph& g, const FeatureMatrix& x, SimilarityMode mode) {
  if (g.num_edges() == 0) throw DataError("mean_edge_similarity: graph has no edges");
  double sum = 0.0;
  for (const auto& [u, v] : g.edge_list()) sum += edge_similarity(x, u, v, mode);
  return sum / static_cast<double>(g.num_edges());
}

}  // namespace de2gnn
