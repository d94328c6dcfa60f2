#include "de2gnn/purify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "de2gnn/errors.hpp"

namespace de2gnn {

namespace {

void require_mode_fits(const FeatureMatrix& x, SimilarityMode mode) {
  if (mode == SimilarityMode::jaccard && x.kind != FeatureKind::discrete)
    throw ConfigError("jaccard similarity requires discrete features");
}

}  // namespace

double edge_similarity(const FeatureMatrix& x, NodeId i, NodeId j, SimilarityMode mode) {
  require_mode_fits(x, mode);
  const double* a = x.values.row(i);
  const double* b = x.values.row(j);
  const int d = x.dim();
  if (mode == SimilarityMode::jaccard) {
    long inter = 0, uni = 0;
    for (int f = 0; f < d; ++f) {
      const bool ai = a[f] != 0.0;
      const bool bi = b[f] != 0.0;
      inter += ai && bi;
      uni += ai || bi;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int f = 0; f < d; ++f) {
    dot += a[f] * b[f];
    na += a[f] * a[f];
    nb += b[f] * b[f];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimilarityIndex::SimilarityIndex(const FeatureMatrix& x, SimilarityMode mode)
    : x_(x), mode_(mode) {
  require_mode_fits(x, mode);
  const int n = x.num_nodes();
  const int d = x.dim();
  norms_.assign(static_cast<std::size_t>(n), 0.0);
  supports_.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<std::int64_t> counts(static_cast<std::size_t>(d) + 1, 0);
  for (int i = 0; i < n; ++i) {
    const double* row = x.values.row(i);
    for (int f = 0; f < d; ++f) {
      if (row[f] != 0.0) {
        ++counts[static_cast<std::size_t>(f) + 1];
        norms_[i] += row[f] * row[f];
        supports_[i] += 1.0;
      }
    }
    norms_[i] = std::sqrt(norms_[i]);
  }
  for (std::size_t f = 1; f < counts.size(); ++f) counts[f] += counts[f - 1];
  col_ptr_ = counts;
  col_rows_.resize(static_cast<std::size_t>(col_ptr_.back()));
  col_vals_.resize(col_rows_.size());
  std::vector<std::int64_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  for (int i = 0; i < n; ++i) {
    const double* row = x.values.row(i);
    for (int f = 0; f < d; ++f) {
      if (row[f] != 0.0) {
        const std::int64_t at = cursor[f]++;
        col_rows_[static_cast<std::size_t>(at)] = i;
        col_vals_[static_cast<std::size_t>(at)] = row[f];
      }
    }
  }
}

void SimilarityIndex::scores_for(NodeId u, std::vector<double>& scores) const {
  const int n = x_.num_nodes();
  scores.assign(static_cast<std::size_t>(n), 0.0);
  const double* row = x_.values.row(u);
  for (int f = 0; f < x_.dim(); ++f) {
    const double xu = row[f];
    if (xu == 0.0) continue;
    for (std::int64_t e = col_ptr_[f]; e < col_ptr_[f + 1]; ++e)
      scores[static_cast<std::size_t>(col_rows_[static_cast<std::size_t>(e)])] +=
          xu * col_vals_[static_cast<std::size_t>(e)];
  }
  if (mode_ == SimilarityMode::jaccard) {
    // dot of 0/1 rows = intersection size
    for (int v = 0; v < n; ++v) {
      const double uni = supports_[u] + supports_[v] - scores[v];
      scores[v] = uni == 0.0 ? 0.0 : scores[v] / uni;
    }
  } else {
    for (int v = 0; v < n; ++v) {
      const double denom = norms_[u] * norms_[v];
      scores[v] = denom == 0.0 ? 0.0 : scores[v] / denom;
    }
  }
  scores[static_cast<std::size_t>(u)] = 0.0;
}

double SimilarityIndex::pair(NodeId u, NodeId v) const {
  return edge_similarity(x_, u, v, mode_);
}

PurifyResult remove_heterophilic(const Graph& g, const FeatureMatrix& x, double t1,
                                 SimilarityMode mode) {
  require_mode_fits(x, mode);
  if (g.num_nodes() != static_cast<NodeId>(x.num_nodes()))
    throw DataError("remove_heterophilic: graph and feature node counts differ");
  PurifyResult out;
  for (const auto& e : g.edge_list()) {
    if (!(edge_similarity(x, e.first, e.second, mode) > t1)) out.removed.push_back(e);
  }
  out.graph = g.with_edges_removed(out.removed);
  return out;
}

Graph build_knn_graph(const FeatureMatrix& x, int k, SimilarityMode mode) {
  const NodeId n = static_cast<NodeId>(x.num_nodes());
  if (k < 1 || k > n - 1)
    throw ConfigError("build_knn_graph: k must be in [1, n-1], got k=" + std::to_string(k) +
                      " with n=" + std::to_string(n));
  SimilarityIndex index(x, mode);
  std::vector<double> scores;
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::vector<EdgePair> edges;
  edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
  for (NodeId u = 0; u < n; ++u) {
    index.scores_for(u, scores);
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + u);
    // highest similarity first; ties toward smaller id
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](NodeId a, NodeId b) {
      if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
      return a < b;
    });
    for (int i = 0; i < k; ++i) edges.emplace_back(u, order[static_cast<std::size_t>(i)]);
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace de2gnn
