#pragma once

#include <string>
#include <vector>

#include "de2gnn/graph.hpp"
#include "de2gnn/matrix.hpp"

namespace de2gnn {

enum class FeatureKind { discrete, continuous };

// Node features, dense row per node. For discrete (bag-of-words) data every
// entry is 0/1 and no row is all-zero; the loader enforces both.
struct FeatureMatrix {
  DenseMatrix values;
  FeatureKind kind = FeatureKind::discrete;

  int num_nodes() const { return values.rows; }
  int dim() const { return values.cols; }
};

struct LabelVector {
  std::vector<int> labels;
  int num_classes = 0;
};

// Disjoint node id lists, each sorted ascending.
struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

struct Dataset {
  std::string name;
  Graph graph;
  FeatureMatrix features;
  LabelVector labels;
  SplitMasks splits;
};

// Reads a dataset.json manifest naming the edge/feature/label/split files
// (paths relative to the manifest) and the feature kind. Validates shape
// consistency, 0/1-ness and nonzero rows for discrete features, label range,
// split disjointness, and that every class appears in the training split.
// Warns (does not fail) when the graph is disconnected.
Dataset load_dataset(const std::string& manifest_path);

// Writes edges.tsv / features.tsv / labels.tsv / splits.json / dataset.json
// into dir (created if missing).
void write_dataset(const Dataset& ds, const std::string& dir);

// Edge file: one edge per line, two 0-based ids separated by a tab. Blank
// lines and lines starting with '#' are ignored. Self-loop lines are dropped
// with a warning. Used for clean graphs, perturbed graphs, and audit files.
std::vector<EdgePair> read_edge_file(const std::string& path, NodeId num_nodes);
void write_edge_file(const std::vector<EdgePair>& edges, const std::string& path);

}  // namespace de2gnn
