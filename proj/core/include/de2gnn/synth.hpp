#pragma once

#include <cstdint>
#include <string>

#include "de2gnn/dataset.hpp"

namespace de2gnn {

// Deterministic citation-style benchmark generator. Produces a graph with a
// heavy-tailed degree distribution and homophilous structure plus binary
// topic-model features, sized exactly to the requested node/edge/feature/
// class counts. Difficulty is controlled by behavior_flip (fraction of nodes
// that structurally and textually act like another class, which caps
// attainable accuracy), mix_homophily, and own_topic_prob.
struct SynthProfile {
  std::string name = "synth";
  int num_nodes = 0;
  std::int64_t num_edges = 0;
  int num_features = 0;
  int num_classes = 0;
  double mix_homophily = 0.85;  // edge drawn within the effective class
  double behavior_flip = 0.15;  // node acts as a uniformly different class
  double own_topic_prob = 0.5;  // word drawn from the class topic block
  double words_mean = 18.0;     // mean word draws per node
  double degree_alpha = 2.5;    // pareto exponent of degree propensities
  double train_frac = 0.1;
  double val_frac = 0.1;
  std::uint64_t seed = 7;
};

// Frozen profiles matching the published citation benchmark statistics.
SynthProfile cora_like_profile();
SynthProfile citeseer_like_profile();

Dataset make_synthetic_dataset(const SynthProfile& profile);

}  // namespace de2gnn
