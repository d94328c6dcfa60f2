#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace de2gnn {

using NodeId = std::int32_t;
using EdgePair = std::pair<NodeId, NodeId>;

// Undirected simple graph in CSR form. Invariants: adjacency is symmetric,
// neighbor lists are sorted and duplicate-free, no self-loops are stored,
// num_edges counts undirected edges once. Instances are immutable; the edit
// operations return new graphs.
class Graph {
 public:
  Graph() = default;

  // Accepts edges in either orientation, deduplicates, rejects self-loops.
  static Graph from_edges(NodeId num_nodes, std::vector<EdgePair> edges);

  NodeId num_nodes() const { return n_; }
  std::int64_t num_edges() const { return m_; }

  int degree(NodeId u) const {
    return static_cast<int>(offsets_[static_cast<std::size_t>(u) + 1] - offsets_[u]);
  }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {cols_.data() + offsets_[u],
            static_cast<std::size_t>(offsets_[static_cast<std::size_t>(u) + 1] - offsets_[u])};
  }

  bool has_edge(NodeId u, NodeId v) const;

  // Canonical edge list: u < v, sorted lexicographically.
  std::vector<EdgePair> edge_list() const;

  // Every listed edge must exist (after canonicalization + dedup of the list).
  Graph with_edges_removed(const std::vector<EdgePair>& edges) const;
  // Self-loops are rejected; edges already present are kept once.
  Graph with_edges_added(const std::vector<EdgePair>& edges) const;

  bool is_connected() const;

  const std::vector<std::int64_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& cols() const { return cols_; }

 private:
  // edges must be canonical (u < v), sorted, unique, in range.
  static Graph from_canonical(NodeId n, const std::vector<EdgePair>& edges);

  NodeId n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> cols_;
};

// Nodes with degree <= bound, ascending. bound < 0 is an error.
std::vector<NodeId> tail_nodes(const Graph& g, int bound);

}  // namespace de2gnn
