#pragma once

#include <utility>
#include <vector>

#include "de2gnn/dataset.hpp"
#include "de2gnn/graph.hpp"

namespace de2gnn {

enum class SimilarityMode { jaccard, cosine };

// Feature similarity between two nodes. jaccard requires discrete features
// and compares supports; cosine works on any features and returns 0 when
// either row has zero norm. Symmetric, range [0, 1] (cosine on nonnegative
// data; general continuous data may produce negatives, which is fine for
// thresholding).
double edge_similarity(const FeatureMatrix& x, NodeId i, NodeId j, SimilarityMode mode);

struct PurifyResult {
  Graph graph;
  std::vector<EdgePair> removed;  // canonical order
};

// Keeps exactly the edges with similarity strictly above t1.
PurifyResult remove_heterophilic(const Graph& g, const FeatureMatrix& x, double t1,
                                 SimilarityMode mode);

// kNN feature graph: every node picks its k most similar other nodes
// (ties broken toward smaller id), edges are the union of the picks.
// Requires 1 <= k <= n-1.
Graph build_knn_graph(const FeatureMatrix& x, int k, SimilarityMode mode);

// Shared fast path for all-pairs similarity against one node: accumulates
// scores for every v via an inverted index over feature support. scores is
// resized to n; entries for v with zero overlap stay 0.
class SimilarityIndex {
 public:
  SimilarityIndex(const FeatureMatrix& x, SimilarityMode mode);

  // Fills scores[v] with sim(u, v) for all v; scores[u] is set to 0.
  void scores_for(NodeId u, std::vector<double>& scores) const;

  double pair(NodeId u, NodeId v) const;
  SimilarityMode mode() const { return mode_; }

 private:
  const FeatureMatrix& x_;
  SimilarityMode mode_;
  // CSC of the feature matrix.
  std::vector<std::int64_t> col_ptr_;
  std::vector<NodeId> col_rows_;
  std::vector<double> col_vals_;
  std::vector<double> norms_;     // L2 norms (cosine)
  std::vector<double> supports_;  // nonzero counts (jaccard)
};

}  // namespace de2gnn
