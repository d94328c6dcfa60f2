#include "de2gnn/graph.hpp"

#include <algorithm>
#include <string>

#include "de2gnn/errors.hpp"

namespace de2gnn {

namespace {

EdgePair canonical(EdgePair e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  return e;
}

std::vector<EdgePair> canonicalize(std::vector<EdgePair> edges) {
  for (auto& e : edges) e = canonical(e);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

Graph Graph::from_canonical(NodeId n, const std::vector<EdgePair>& edges) {
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    ++offsets[static_cast<std::size_t>(u) + 1];
    ++offsets[static_cast<std::size_t>(v) + 1];
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];

  std::vector<NodeId> cols(static_cast<std::size_t>(2) * edges.size());
  std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    cols[static_cast<std::size_t>(cursor[u]++)] = v;
    cols[static_cast<std::size_t>(cursor[v]++)] = u;
  }
  for (NodeId u = 0; u < n; ++u)
    std::sort(cols.begin() + offsets[u], cols.begin() + offsets[static_cast<std::size_t>(u) + 1]);

  Graph g;
  g.n_ = n;
  g.m_ = static_cast<std::int64_t>(edges.size());
  g.offsets_ = std::move(offsets);
  g.cols_ = std::move(cols);
  return g;
}

Graph Graph::from_edges(NodeId num_nodes, std::vector<EdgePair> edges) {
  if (num_nodes < 0) throw DataError("graph: negative node count");
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      throw DataError("graph: node id out of range: (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") with " + std::to_string(num_nodes) + " nodes");
    if (u == v) throw DataError("graph: self-loop rejected at node " + std::to_string(u));
  }
  return from_canonical(num_nodes, canonicalize(std::move(edges)));
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u == v) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<EdgePair> Graph::edge_list() const {
  std::vector<EdgePair> out;
  out.reserve(static_cast<std::size_t>(m_));
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph Graph::with_edges_removed(const std::vector<EdgePair>& edges) const {
  auto to_remove = canonicalize(edges);
  for (const auto& [u, v] : to_remove) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_ || !has_edge(u, v))
      throw DataError("with_edges_removed: edge (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") does not exist");
  }
  auto current = edge_list();
  std::vector<EdgePair> kept;
  kept.reserve(current.size());
  std::set_difference(current.begin(), current.end(), to_remove.begin(), to_remove.end(),
                      std::back_inserter(kept));
  return from_canonical(n_, kept);
}

Graph Graph::with_edges_added(const std::vector<EdgePair>& edges) const {
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
      throw DataError("with_edges_added: node id out of range: (" + std::to_string(u) + ", " +
                      std::to_string(v) + ")");
    if (u == v)
      throw DataError("with_edges_added: self-loop rejected at node " + std::to_string(u));
  }
  auto merged = edge_list();
  auto canon = canonicalize(edges);
  merged.insert(merged.end(), canon.begin(), canon.end());
  return from_canonical(n_, canonicalize(std::move(merged)));
}

bool Graph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::int64_t visited = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n_;
}

std::vector<NodeId> tail_nodes(const Graph& g, int bound) {
  if (bound < 0) throw ConfigError("tail_nodes: bound must be >= 0");
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.degree(u) <= bound) out.push_back(u);
  return out;
}

}  // namespace de2gnn
