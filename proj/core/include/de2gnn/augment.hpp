#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "de2gnn/dataset.hpp"
#include "de2gnn/gnn.hpp"
#include "de2gnn/graph.hpp"

namespace de2gnn {

// Full softmax output of a GCN trained to guide augmentation, one row per
// node, rows sum to 1.
struct SurrogateOutput {
  DenseMatrix probs;
};

SurrogateOutput train_surrogate(const Graph& g, const FeatureMatrix& x, const LabelVector& labels,
                                const SplitMasks& splits, const TrainConfig& cfg,
                                std::uint64_t seed);

struct AugmentConfig {
  int p = 3;         // links added per qualifying tail node
  double t2 = 0.8;   // confidence gate (strict >)
};

struct AddedEdge {
  NodeId u = 0;  // tail node
  NodeId v = 0;  // partner
  double score = 0.0;  // partner's probability for the tail node's class
};

struct AugmentResult {
  Graph graph;
  std::vector<AddedEdge> added;  // in decision order, deduplicated
};

// For each node in tails whose surrogate confidence (max probability)
// exceeds t2 strictly: take its class (the true label when the node is in
// the training split, else the surrogate argmax), rank all non-adjacent
// other nodes by their probability for that class (ties toward smaller id),
// and connect the top p. Candidate adjacency is evaluated against the input
// graph only; additions never block later ones. The tail list is the
// caller's (degree reference is a pipeline-level choice).
AugmentResult add_homophilic_links(const Graph& g, const SurrogateOutput& surrogate,
                                   const LabelVector& labels, std::span<const NodeId> train_mask,
                                   std::span<const NodeId> tails, const AugmentConfig& cfg);

void write_added_edges(const std::vector<AddedEdge>& added, const std::string& path);

}  // namespace de2gnn
