#include "de2gnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "de2gnn/errors.hpp"
#include "de2gnn/matrix.hpp"

namespace de2gnn {

namespace {

int poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double p = 1.0;
  int k = 0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

// cumulative-weight sampler over a fixed id list
struct WeightedPicker {
  std::vector<NodeId> ids;
  std::vector<double> cum;

  void build(const std::vector<NodeId>& members, const std::vector<double>& weight) {
    ids = members;
    cum.resize(ids.size());
    double total = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      total += weight[static_cast<std::size_t>(ids[i])];
      cum[i] = total;
    }
  }

  NodeId pick(Rng& rng) const {
    const double r = rng.uniform() * cum.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    const std::size_t idx = std::min(static_cast<std::size_t>(it - cum.begin()), ids.size() - 1);
    return ids[idx];
  }
};

std::uint64_t key_of(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

}  // namespace

SynthProfile cora_like_profile() {
  SynthProfile p;
  p.name = "cora-synth";
  p.num_nodes = 2485;
  p.num_edges = 5069;
  p.num_features = 1433;
  p.num_classes = 7;
  p.mix_homophily = 0.90;
  p.behavior_flip = 0.13;
  p.own_topic_prob = 0.62;
  p.words_mean = 18.0;
  p.degree_alpha = 2.6;
  p.seed = 20260401;
  return p;
}

SynthProfile citeseer_like_profile() {
  SynthProfile p;
  p.name = "citeseer-synth";
  p.num_nodes = 2100;
  p.num_edges = 3668;
  p.num_features = 3703;
  p.num_classes = 6;
  p.mix_homophily = 0.86;
  p.behavior_flip = 0.23;
  p.own_topic_prob = 0.60;
  p.words_mean = 20.0;
  p.degree_alpha = 2.6;
  p.seed = 20260402;
  return p;
}

Dataset make_synthetic_dataset(const SynthProfile& profile) {
  const int n = profile.num_nodes;
  const int d = profile.num_features;
  const int c = profile.num_classes;
  const std::int64_t m = profile.num_edges;
  if (n < 4 || c < 2 || d < c) throw ConfigError("synth profile: degenerate sizes");
  if (m < n / 2 || m > static_cast<std::int64_t>(n) * (n - 1) / 2)
    throw ConfigError("synth profile: edge count out of range");

  Rng rng(profile.seed);

  // true labels and effective (behavioral) classes
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& y : labels) y = rng.uniform_int(c);
  std::vector<int> effective(labels);
  for (int i = 0; i < n; ++i) {
    if (rng.uniform() < profile.behavior_flip) {
      int other = rng.uniform_int(c - 1);
      if (other >= labels[static_cast<std::size_t>(i)]) ++other;
      effective[static_cast<std::size_t>(i)] = other;
    }
  }

  // heavy-tailed degree propensities
  std::vector<double> weight(static_cast<std::size_t>(n));
  const double exponent = -1.0 / (profile.degree_alpha - 1.0);
  for (auto& w : weight) w = std::pow(1.0 - rng.uniform(), exponent);
  const double cap = 60.0;
  for (auto& w : weight) w = std::min(w, cap);

  std::vector<NodeId> everyone(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) everyone[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<NodeId>> by_class(static_cast<std::size_t>(c));
  for (int i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(effective[static_cast<std::size_t>(i)])].push_back(i);
  for (int k = 0; k < c; ++k)
    if (by_class[static_cast<std::size_t>(k)].empty())
      throw DataError("synth: effective class " + std::to_string(k) + " is empty; change seed");

  WeightedPicker global;
  global.build(everyone, weight);
  std::vector<WeightedPicker> class_picker(static_cast<std::size_t>(c));
  for (int k = 0; k < c; ++k)
    class_picker[static_cast<std::size_t>(k)].build(by_class[static_cast<std::size_t>(k)], weight);

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  std::vector<EdgePair> edges;
  edges.reserve(static_cast<std::size_t>(m));
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  auto add_edge = [&](NodeId u, NodeId v) {
    if (u == v || !seen.insert(key_of(u, v)).second) return false;
    edges.emplace_back(std::min(u, v), std::max(u, v));
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
    return true;
  };

  long guard = 0;
  while (static_cast<std::int64_t>(edges.size()) < m) {
    if (++guard > 200 * m)
      throw DataError("synth: edge sampling did not converge; loosen the profile");
    const NodeId u = global.pick(rng);
    const NodeId v =
        rng.uniform() < profile.mix_homophily
            ? class_picker[static_cast<std::size_t>(effective[static_cast<std::size_t>(u)])].pick(
                  rng)
            : global.pick(rng);
    add_edge(u, v);
  }

  // give isolated nodes one same-class edge each, then trim back to m edges
  long added_fix = 0;
  for (NodeId u = 0; u < n; ++u) {
    while (degree[static_cast<std::size_t>(u)] == 0) {
      const NodeId v =
          class_picker[static_cast<std::size_t>(effective[static_cast<std::size_t>(u)])].pick(rng);
      if (add_edge(u, v)) ++added_fix;
    }
  }
  if (added_fix > 0) {
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<char> removed(edges.size(), 0);
    long to_remove = added_fix;
    for (std::size_t idx : order) {
      if (to_remove == 0) break;
      const auto& [a, b] = edges[idx];
      if (degree[static_cast<std::size_t>(a)] >= 2 && degree[static_cast<std::size_t>(b)] >= 2) {
        removed[idx] = 1;
        --degree[static_cast<std::size_t>(a)];
        --degree[static_cast<std::size_t>(b)];
        --to_remove;
      }
    }
    if (to_remove != 0) throw DataError("synth: could not rebalance edge count; change seed");
    std::vector<EdgePair> kept;
    kept.reserve(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (!removed[i]) kept.push_back(edges[i]);
    edges = std::move(kept);
  }

  Dataset ds;
  ds.name = profile.name;
  ds.graph = Graph::from_edges(n, edges);
  if (ds.graph.num_edges() != m) throw DataError("synth: internal edge count mismatch");

  // binary topic features; class k owns the feature block [k*d/c, (k+1)*d/c).
  // Within a block word popularity is Zipfian, so same-topic nodes overlap on
  // the head words the way documents about one subject reuse its vocabulary.
  ds.features.kind = FeatureKind::discrete;
  ds.features.values = DenseMatrix(n, d);
  const int block = d / c;
  std::vector<NodeId> ranks(static_cast<std::size_t>(block));
  std::vector<double> zipf(static_cast<std::size_t>(block));
  for (int r = 0; r < block; ++r) {
    ranks[static_cast<std::size_t>(r)] = r;
    zipf[static_cast<std::size_t>(r)] = 1.0 / std::pow(static_cast<double>(r + 1), 1.8);
  }
  WeightedPicker word_picker;
  word_picker.build(ranks, zipf);
  // Document lengths mix keyword stubs (1-3 words) with normal docs, and
  // every doc opens with its topic's rank-1 keyword.  Together with the
  // 10-draw cap this pins the edge-similarity floor: two docs of one topic
  // always share a word, and 1/(10+10-1) > 0.05, so same-topic pairs can
  // never look dissimilar while unrelated pairs usually share nothing.
  // Adjacent topics borrow vocabulary: a slice of each on-topic draw lands
  // in the next topic's block, the way related subject areas overlap.
  const double stub_frac = 0.2;
  const double neighbor_leak = 0.25;
  const int draw_cap = 10;
  for (int i = 0; i < n; ++i) {
    double* row = ds.features.values.row(i);
    const int e = effective[static_cast<std::size_t>(i)];
    const int lo = e * block;
    row[lo] = 1.0;
    const double mean_i =
        rng.uniform() < stub_frac ? 0.6 : std::min(profile.words_mean, 9.0) - 1.0;
    const int extra =
        std::min(draw_cap - 1, poisson(rng, std::max(mean_i, 0.0)));
    for (int w = 0; w < extra; ++w) {
      int f;
      if (rng.uniform() < profile.own_topic_prob) {
        const int topic = rng.uniform() < neighbor_leak ? (e + 1) % c : e;
        f = topic * block + word_picker.pick(rng);
      } else {
        f = rng.uniform_int(d);
      }
      row[f] = 1.0;
    }
  }

  ds.labels.labels = labels;
  ds.labels.num_classes = c;

  // stratified split over true labels
  std::vector<std::vector<NodeId>> by_label(static_cast<std::size_t>(c));
  for (int i = 0; i < n; ++i) by_label[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
  for (int k = 0; k < c; ++k) {
    auto& members = by_label[static_cast<std::size_t>(k)];
    if (members.empty()) throw DataError("synth: class " + std::to_string(k) + " empty; change seed");
    rng.shuffle(members);
    const auto sz = static_cast<double>(members.size());
    const std::size_t n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(profile.train_frac * sz)));
    const std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(profile.val_frac * sz)));
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i < n_train)
        ds.splits.train.push_back(members[i]);
      else if (i < n_train + n_val)
        ds.splits.val.push_back(members[i]);
      else
        ds.splits.test.push_back(members[i]);
    }
  }
  std::sort(ds.splits.train.begin(), ds.splits.train.end());
  std::sort(ds.splits.val.begin(), ds.splits.val.end());
  std::sort(ds.splits.test.begin(), ds.splits.test.end());
  return ds;
}

}  // namespace de2gnn
