#include <cmath>
#include <vector>

#include <doctest.h>

#include "de2gnn/errors.hpp"
#include "de2gnn/gnn.hpp"
#include "helpers.hpp"

using namespace de2gnn;

namespace {

// |a-b| within max(abs_tol, rel_tol * magnitude)
bool close(double a, double b, double rel_tol, double abs_tol) {
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)));
}

struct FdInstance {
  Graph g;
  FeatureMatrix x;
  CsrMatrix xs;
  LabelVector labels;
  std::vector<NodeId> mask;
  GcnParams params;
  NormalizedAdjacency adj;
  double wd = 0.0;
};

FdInstance random_instance(std::uint64_t seed, int n, int d, int h, int c) {
  Rng rng(seed);
  FdInstance inst;
  std::vector<EdgePair> edges;
  for (NodeId u = 1; u < n; ++u) edges.push_back({u, static_cast<NodeId>(rng.uniform_int(u))});
  for (int extra = 0; extra < n / 2; ++extra) {
    NodeId u = rng.uniform_int(n), v = rng.uniform_int(n);
    if (u != v) edges.push_back({u, v});
  }
  inst.g = Graph::from_edges(n, edges);
  DenseMatrix x(n, d);
  for (auto& vv : x.data) vv = rng.uniform(-1.0, 1.0);
  inst.x = {std::move(x), FeatureKind::continuous};
  inst.xs = csr_from_dense(inst.x.values);
  inst.labels.num_classes = c;
  inst.labels.labels.resize(n);
  for (auto& l : inst.labels.labels) l = rng.uniform_int(c);
  for (NodeId v = 0; v < n; ++v)
    if (rng.uniform() < 0.6) inst.mask.push_back(v);
  if (inst.mask.empty()) inst.mask.push_back(0);
  inst.params.w1 = glorot(d, h, rng);
  inst.params.w2 = glorot(h, c, rng);
  inst.adj = normalized_adjacency(inst.g);
  inst.wd = rng.uniform(0.0, 0.01);
  return inst;
}

double objective(const FdInstance& inst, const GcnParams& p) {
  GcnActivations act = gcn_forward(p, inst.adj, inst.xs, 0.0, nullptr);
  double data = masked_cross_entropy(act.probs, inst.labels, inst.mask) /
                static_cast<double>(inst.mask.size());
  return data + 0.5 * inst.wd * (sum_squares(p.w1) + sum_squares(p.w2));
}

// smallest |pre-relu| entry; finite differences degrade near the kink
double kink_distance(const FdInstance& inst) {
  GcnActivations act = gcn_forward(inst.params, inst.adj, inst.xs, 0.0, nullptr);
  double dist = 1e300;
  for (double v : act.pre_hidden.data) dist = std::min(dist, std::abs(v));
  return dist;
}

}  // namespace

TEST_SUITE("gnn") {

TEST_CASE("normalized adjacency on a path") {
  Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
  NormalizedAdjacency a = normalized_adjacency(path);
  REQUIRE(a.n == 3);
  // degrees+1: 2, 3, 2
  REQUIRE(a.row_ptr == std::vector<std::int64_t>{0, 2, 5, 7});
  CHECK(a.col == std::vector<NodeId>{0, 1, 0, 1, 2, 1, 2});
  CHECK(a.weight[0] == doctest::Approx(0.5).epsilon(1e-15));                  // (0,0)
  CHECK(a.weight[1] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));  // (0,1)
  CHECK(a.weight[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));             // (1,1)
  CHECK(a.weight[6] == doctest::Approx(0.5).epsilon(1e-15));                   // (2,2)
}

TEST_CASE("adjacency product equals the dense definition") {
  FdInstance inst = random_instance(3, 8, 5, 4, 3);
  DenseMatrix b(8, 4);
  Rng rng(4);
  for (auto& v : b.data) v = rng.uniform(-1.0, 1.0);
  DenseMatrix fast = adj_matmul(inst.adj, b);

  DenseMatrix dense(8, 8);
  for (int u = 0; u < 8; ++u)
    for (auto idx = inst.adj.row_ptr[u]; idx < inst.adj.row_ptr[u + 1]; ++idx)
      dense.at(u, inst.adj.col[idx]) = inst.adj.weight[idx];
  DenseMatrix slow = matmul(dense, b);
  for (std::size_t i = 0; i < fast.size(); ++i)
    CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-14));
}

TEST_CASE("softmax and cross entropy oracles") {
  DenseMatrix logits(2, 4);
  row_softmax(logits);
  for (double v : logits.data) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  // shift invariance
  DenseMatrix a(1, 3), b(1, 3);
  a.at(0, 0) = 1;
  a.at(0, 1) = 2;
  a.at(0, 2) = 3;
  b = a;
  for (auto& v : b.data) v += 500.0;
  row_softmax(a);
  row_softmax(b);
  for (int c = 0; c < 3; ++c) CHECK(a.at(0, c) == doctest::Approx(b.at(0, c)).epsilon(1e-12));

  // uniform probabilities: each masked node contributes ln C
  DenseMatrix probs(3, 4);
  for (auto& v : probs.data) v = 0.25;
  LabelVector labels{{0, 1, 2}, 4};
  std::vector<NodeId> mask{0, 1, 2};
  CHECK(masked_cross_entropy(probs, labels, mask) ==
        doctest::Approx(3.0 * std::log(4.0)).epsilon(1e-14));

  // exact prediction costs zero
  DenseMatrix hard(1, 2);
  hard.at(0, 0) = 1.0;
  LabelVector l2{{0}, 2};
  std::vector<NodeId> m2{0};
  CHECK(masked_cross_entropy(hard, l2, m2) == 0.0);

  CHECK_THROWS_AS(masked_cross_entropy(probs, labels, std::vector<NodeId>{}), NumericError);
}

TEST_CASE("analytic gradients match finite differences") {
  int checked = 0;
  std::uint64_t seed = 100;
  while (checked < 4) {
    FdInstance inst = random_instance(seed++, 10, 6, 5, 3);
    if (kink_distance(inst) < 1e-3) continue;
    ++checked;

    GcnActivations act = gcn_forward(inst.params, inst.adj, inst.xs, 0.0, nullptr);
    GcnGrads grads =
        gcn_backward(inst.params, inst.adj, inst.xs, act, inst.labels, inst.mask, inst.wd);

    const double step = 1e-5;
    GcnParams p = inst.params;
    auto check_matrix = [&](DenseMatrix& w, const DenseMatrix& g) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        double keep = w.data[i];
        w.data[i] = keep + step;
        double up = objective(inst, p);
        w.data[i] = keep - step;
        double down = objective(inst, p);
        w.data[i] = keep;
        double fd = (up - down) / (2 * step);
        CHECK_MESSAGE(close(fd, g.data[i], 1e-5, 1e-8),
                      "fd=" << fd << " analytic=" << g.data[i]);
      }
    };
    check_matrix(p.w1, grads.w1);
    check_matrix(p.w2, grads.w2);
  }
}

TEST_CASE("weight decay enters gradients linearly") {
  FdInstance inst = random_instance(55, 9, 5, 4, 3);
  GcnActivations act = gcn_forward(inst.params, inst.adj, inst.xs, 0.0, nullptr);
  GcnGrads with = gcn_backward(inst.params, inst.adj, inst.xs, act, inst.labels, inst.mask, 0.3);
  GcnGrads without =
      gcn_backward(inst.params, inst.adj, inst.xs, act, inst.labels, inst.mask, 0.0);
  for (std::size_t i = 0; i < with.w1.size(); ++i)
    CHECK(with.w1.data[i] - without.w1.data[i] ==
          doctest::Approx(0.3 * inst.params.w1.data[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < with.w2.size(); ++i)
    CHECK(with.w2.data[i] - without.w2.data[i] ==
          doctest::Approx(0.3 * inst.params.w2.data[i]).epsilon(1e-12));
}

TEST_CASE("zero weights are a stationary point of the decay term") {
  FdInstance inst = random_instance(56, 9, 5, 4, 3);
  GcnParams zero;
  zero.w1 = DenseMatrix(5, 4);
  zero.w2 = DenseMatrix(4, 3);
  GcnActivations act = gcn_forward(zero, inst.adj, inst.xs, 0.0, nullptr);
  GcnGrads g_decay = gcn_backward(zero, inst.adj, inst.xs, act, inst.labels, inst.mask, 0.7);
  GcnGrads g_plain = gcn_backward(zero, inst.adj, inst.xs, act, inst.labels, inst.mask, 0.0);
  for (std::size_t i = 0; i < g_decay.w1.size(); ++i)
    CHECK(g_decay.w1.data[i] == g_plain.w1.data[i]);
  for (std::size_t i = 0; i < g_decay.w2.size(); ++i)
    CHECK(g_decay.w2.data[i] == g_plain.w2.data[i]);
}

TEST_CASE("adam first step and descent on a quadratic") {
  DenseMatrix theta(1, 1);
  theta.at(0, 0) = 10.0;
  AdamState state = make_adam_state({&theta});
  DenseMatrix grad(1, 1);
  grad.at(0, 0) = 14.0;  // arbitrary positive gradient
  adam_step({&theta}, {&grad}, state, 0.02);
  // bias-corrected first step is lr * g / (|g| + eps) = almost exactly lr
  CHECK(theta.at(0, 0) == doctest::Approx(10.0 - 0.02).epsilon(1e-6));

  // minimize (t - 3)^2
  theta.at(0, 0) = 10.0;
  AdamState s2 = make_adam_state({&theta});
  double prev = std::abs(theta.at(0, 0) - 3.0);
  for (int step = 0; step < 100; ++step) {
    grad.at(0, 0) = 2 * (theta.at(0, 0) - 3.0);
    adam_step({&theta}, {&grad}, s2, 0.05);
    double now = std::abs(theta.at(0, 0) - 3.0);
    CHECK(now < prev);
    prev = now;
  }

  grad.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(adam_step({&theta}, {&grad}, s2, 0.05), NumericError);
}

TEST_CASE("argmax breaks ties toward the smaller class") {
  DenseMatrix m(2, 3);
  m.at(0, 0) = 0.4;
  m.at(0, 1) = 0.4;
  m.at(0, 2) = 0.2;
  m.at(1, 2) = 1.0;
  auto am = argmax_rows(m);
  CHECK(am == std::vector<int>{0, 2});

  LabelVector labels{{0, 1}, 3};
  CHECK(accuracy_on(am, labels, std::vector<NodeId>{0, 1}) == 0.5);
}

TEST_CASE("training is deterministic and learns the tiny dataset") {
  Dataset ds = testutil::tiny_dataset();
  TrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.max_epochs = 60;
  cfg.patience = 60;
  GcnTrainResult a = train_gcn(ds.graph, ds.features, ds.labels, ds.splits, cfg, 3);
  GcnTrainResult b = train_gcn(ds.graph, ds.features, ds.labels, ds.splits, cfg, 3);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].train_loss == b.curve[i].train_loss);
    CHECK(a.curve[i].val_acc == b.curve[i].val_acc);
  }
  for (std::size_t i = 0; i < a.params.w1.size(); ++i)
    CHECK(a.params.w1.data[i] == b.params.w1.data[i]);
  CHECK(a.best_val_acc >= 0.5);
  CHECK(a.curve[0].epoch == 1);

  GcnTrainResult c = train_gcn(ds.graph, ds.features, ds.labels, ds.splits, cfg, 4);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.params.w1.size() && !any_diff; ++i)
    any_diff = a.params.w1.data[i] != c.params.w1.data[i];
  CHECK(any_diff);
}

TEST_CASE("patience bounds the epoch count") {
  Dataset ds = testutil::tiny_dataset();
  TrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.max_epochs = 200;
  cfg.patience = 5;
  GcnTrainResult r = train_gcn(ds.graph, ds.features, ds.labels, ds.splits, cfg, 3);
  CHECK(r.curve.size() <= 200);
  CHECK(static_cast<int>(r.curve.size()) <= r.best_epoch + 5);
}

TEST_CASE("exploding inputs raise a numeric error") {
  Dataset ds = testutil::tiny_dataset();
  for (auto& v : ds.features.values.data) v *= 1e308;
  ds.features.kind = FeatureKind::continuous;
  TrainConfig cfg;
  cfg.hidden_dim = 8;
  CHECK_THROWS_AS(train_gcn(ds.graph, ds.features, ds.labels, ds.splits, cfg, 3), NumericError);
}

TEST_CASE("dropout scales and masks the hidden layer") {
  FdInstance inst = random_instance(77, 10, 6, 5, 3);
  Rng rng(5);
  GcnActivations train_act = gcn_forward(inst.params, inst.adj, inst.xs, 0.5, &rng);
  GcnActivations eval_act = gcn_forward(inst.params, inst.adj, inst.xs, 0.5, nullptr);
  REQUIRE(train_act.drop_mask.size() == train_act.hidden.size());
  CHECK(eval_act.drop_mask.empty());
  CHECK(train_act.keep_prob == 0.5);
  int dropped = 0;
  for (std::size_t i = 0; i < train_act.hidden.size(); ++i) {
    if (!train_act.drop_mask[i]) {
      CHECK(train_act.hidden.data[i] == 0.0);
      ++dropped;
    } else {
      CHECK(train_act.hidden.data[i] ==
            doctest::Approx(eval_act.hidden.data[i] / 0.5).epsilon(1e-12));
    }
  }
  CHECK(dropped > 0);
}

TEST_CASE("validate train config") {
  TrainConfig cfg;
  CHECK_NOTHROW(validate_train_config(cfg));
  TrainConfig bad = cfg;
  bad.dropout = 1.0;
  CHECK_THROWS_AS(validate_train_config(bad), ConfigError);
  bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(validate_train_config(bad), ConfigError);
  bad = cfg;
  bad.hidden_dim = 0;
  CHECK_THROWS_AS(validate_train_config(bad), ConfigError);
  bad = cfg;
  bad.patience = 0;
  CHECK_THROWS_AS(validate_train_config(bad), ConfigError);
}

}  // TEST_SUITE
