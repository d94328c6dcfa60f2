#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "de2gnn/dataset.hpp"
#include "de2gnn/gnn.hpp"
#include "de2gnn/purify.hpp"

namespace de2gnn {

struct AttackBudget {
  double rate = 0.0;
  std::int64_t delta = 0;  // edges to add
};

// delta = round(rate * num_clean_edges), half away from zero.
AttackBudget make_budget(double rate, std::int64_t num_clean_edges);

struct PerturbationRecord {
  std::vector<EdgePair> added;    // canonical order
  std::vector<EdgePair> removed;  // canonical order
  double rate = 0.0;              // (|added| + |removed|) / |E_clean|
  std::string source;             // "heuristic" or "external_file"
};

// Loads an externally produced perturbed edge file over the dataset's node
// set and diffs it against the clean graph. Emits a warning when the diff is
// empty.
std::pair<Graph, PerturbationRecord> load_perturbed_graph(const Dataset& ds,
                                                          const std::string& path);

// Poisoning-style edge injection: adds exactly budget.delta edges whose
// endpoints (a) carry different labels (true labels on the training split,
// otherwise the predictions of a GCN trained on the clean graph) and
// (b) have feature similarity below the median similarity of the clean
// edges. Sampling is uniform without replacement from that pool, seeded.
// No removals. Throws DataError when the pool is smaller than the budget.
std::pair<Graph, PerturbationRecord> heuristic_attack(const Dataset& ds,
                                                      const AttackBudget& budget,
                                                      const TrainConfig& surrogate_cfg,
                                                      SimilarityMode mode, std::uint64_t seed);

void write_perturbation_json(const PerturbationRecord& rec, double requested_rate,
                             const std::string& path);

double mean_edge_similarity(const Graph& g, const FeatureMatrix& x, SimilarityMode mode);

}  // namespace de2gnn
