#include "de2gnn/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "de2gnn/errors.hpp"

namespace de2gnn {

NormalizedAdjacency normalized_adjacency(const Graph& g) {
  const int n = g.num_nodes();
  NormalizedAdjacency a;
  a.n = n;
  a.row_ptr.assign(1, 0);
  a.row_ptr.reserve(static_cast<std::size_t>(n) + 1);
  a.col.reserve(static_cast<std::size_t>(2) * g.num_edges() + n);
  a.weight.reserve(a.col.capacity());

  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (NodeId u = 0; u < n; ++u)
    inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) + 1.0);

  for (NodeId u = 0; u < n; ++u) {
    bool diag_done = false;
    for (NodeId v : g.neighbors(u)) {
      if (!diag_done && u < v) {
        a.col.push_back(u);
        a.weight.push_back(inv_sqrt[u] * inv_sqrt[u]);
        diag_done = true;
      }
      a.col.push_back(v);
      a.weight.push_back(inv_sqrt[u] * inv_sqrt[v]);
    }
    if (!diag_done) {
      a.col.push_back(u);
      a.weight.push_back(inv_sqrt[u] * inv_sqrt[u]);
    }
    a.row_ptr.push_back(static_cast<std::int64_t>(a.col.size()));
  }
  return a;
}

DenseMatrix adj_matmul(const NormalizedAdjacency& a, const DenseMatrix& b) {
  if (a.n != b.rows) throw NumericError("adj_matmul: dimension mismatch");
  DenseMatrix out(a.n, b.cols);
  for (int i = 0; i < a.n; ++i) {
    double* orow = out.row(i);
    for (std::int64_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      const double w = a.weight[static_cast<std::size_t>(e)];
      const double* brow = b.row(a.col[static_cast<std::size_t>(e)]);
      for (int j = 0; j < b.cols; ++j) orow[j] += w * brow[j];
    }
  }
  return out;
}

DenseMatrix glorot(int rows, int cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  const double bound = std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
  for (auto& v : m.data) v = rng.uniform(-bound, bound);
  return m;
}

void row_softmax(DenseMatrix& m) {
  for (int i = 0; i < m.rows; ++i) {
    double* row = m.row(i);
    double mx = row[0];
    for (int j = 1; j < m.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < m.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (int j = 0; j < m.cols; ++j) row[j] /= sum;
  }
}

GcnActivations gcn_forward(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x,
                           double dropout, Rng* rng) {
  GcnActivations act;
  act.xw1 = csr_matmul(x, p.w1);
  act.pre_hidden = adj_matmul(adj, act.xw1);
  act.hidden = act.pre_hidden;
  for (auto& v : act.hidden.data) v = v > 0.0 ? v : 0.0;

  if (rng != nullptr && dropout > 0.0) {
    act.keep_prob = 1.0 - dropout;
    act.drop_mask.resize(act.hidden.size());
    const double inv_keep = 1.0 / act.keep_prob;
    for (std::size_t i = 0; i < act.hidden.data.size(); ++i) {
      const bool keep = rng->uniform() >= dropout;
      act.drop_mask[i] = keep;
      act.hidden.data[i] = keep ? act.hidden.data[i] * inv_keep : 0.0;
    }
  }

  act.logits = adj_matmul(adj, matmul(act.hidden, p.w2));
  act.probs = act.logits;
  row_softmax(act.probs);
  return act;
}

double masked_cross_entropy(const DenseMatrix& probs, const LabelVector& labels,
                            std::span<const NodeId> mask) {
  if (mask.empty()) throw NumericError("masked_cross_entropy: empty mask");
  double loss = 0.0;
  for (NodeId v : mask) loss -= std::log(probs.at(v, labels.labels[v]));
  return loss;
}

DenseMatrix ce_logit_gradient(const DenseMatrix& probs, const LabelVector& labels,
                              std::span<const NodeId> mask) {
  if (mask.empty()) throw NumericError("ce_logit_gradient: empty mask");
  DenseMatrix d(probs.rows, probs.cols);
  const double scale = 1.0 / static_cast<double>(mask.size());
  for (NodeId v : mask) {
    const double* zrow = probs.row(v);
    double* drow = d.row(v);
    for (int c = 0; c < probs.cols; ++c) drow[c] = zrow[c] * scale;
    drow[labels.labels[v]] -= scale;
  }
  return d;
}

GcnGrads gcn_backward(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x,
                      const GcnActivations& act, const DenseMatrix& dlogits, double weight_decay) {
  // logits = A' H W2 with H the (possibly dropped) hidden activations.
  const DenseMatrix d_hw2 = adj_matmul(adj, dlogits);  // A' symmetric
  GcnGrads g;
  g.w2 = matmul_at_b(act.hidden, d_hw2);
  DenseMatrix d_hidden = matmul_a_bt(d_hw2, p.w2);
  if (!act.drop_mask.empty()) {
    const double inv_keep = 1.0 / act.keep_prob;
    for (std::size_t i = 0; i < d_hidden.data.size(); ++i)
      d_hidden.data[i] = act.drop_mask[i] ? d_hidden.data[i] * inv_keep : 0.0;
  }
  for (std::size_t i = 0; i < d_hidden.data.size(); ++i)
    if (act.pre_hidden.data[i] <= 0.0) d_hidden.data[i] = 0.0;
  const DenseMatrix d_xw1 = adj_matmul(adj, d_hidden);
  g.w1 = csr_at_b(x, d_xw1);
  if (weight_decay != 0.0) {
    axpy(g.w1, p.w1, weight_decay);
    axpy(g.w2, p.w2, weight_decay);
  }
  return g;
}

GcnGrads gcn_backward(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x,
                      const GcnActivations& act, const LabelVector& labels,
                      std::span<const NodeId> mask, double weight_decay) {
  return gcn_backward(p, adj, x, act, ce_logit_gradient(act.probs, labels, mask), weight_decay);
}

AdamState make_adam_state(const std::vector<const DenseMatrix*>& params) {
  AdamState s;
  for (const DenseMatrix* p : params) {
    s.m.emplace_back(p->rows, p->cols);
    s.v.emplace_back(p->rows, p->cols);
  }
  return s;
}

void adam_step(const std::vector<DenseMatrix*>& params, const std::vector<const DenseMatrix*>& grads,
               AdamState& state, double learning_rate) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw NumericError("adam_step: parameter/gradient/state count mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    DenseMatrix& w = *params[k];
    const DenseMatrix& g = *grads[k];
    if (!w.same_shape(g)) throw NumericError("adam_step: gradient shape mismatch");
    DenseMatrix& m = state.m[k];
    DenseMatrix& v = state.v[k];
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      const double gi = g.data[i];
      if (!std::isfinite(gi)) throw NumericError("adam_step: non-finite gradient entry");
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * gi;
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * gi * gi;
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      w.data[i] -= learning_rate * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

std::vector<int> argmax_rows(const DenseMatrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows));
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    int best = 0;
    for (int j = 1; j < m.cols; ++j)
      if (row[j] > row[best]) best = j;
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double accuracy_on(const std::vector<int>& pred, const LabelVector& labels,
                   std::span<const NodeId> mask) {
  if (mask.empty()) throw NumericError("accuracy_on: empty mask");
  std::int64_t correct = 0;
  for (NodeId v : mask) correct += pred[static_cast<std::size_t>(v)] == labels.labels[v];
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.hidden_dim < 1) throw ConfigError("train config: hidden_dim must be >= 1");
  if (cfg.max_epochs < 1) throw ConfigError("train config: max_epochs must be >= 1");
  if (cfg.patience < 1) throw ConfigError("train config: patience must be >= 1");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
    throw ConfigError("train config: dropout must be in [0, 1)");
  if (cfg.learning_rate <= 0.0) throw ConfigError("train config: learning_rate must be > 0");
  if (cfg.weight_decay < 0.0) throw ConfigError("train config: weight_decay must be >= 0");
}

GcnTrainResult train_gcn(const Graph& g, const FeatureMatrix& x, const LabelVector& labels,
                         const SplitMasks& splits, const TrainConfig& cfg, std::uint64_t seed) {
  validate_train_config(cfg);
  const NormalizedAdjacency adj = normalized_adjacency(g);
  const CsrMatrix xs = csr_from_dense(x.values);
  Rng rng(seed);

  GcnParams p{glorot(x.dim(), cfg.hidden_dim, rng), glorot(cfg.hidden_dim, labels.num_classes, rng)};
  AdamState adam = make_adam_state({&p.w1, &p.w2});

  GcnTrainResult result;
  result.best_val_acc = -1.0;
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    GcnActivations act = gcn_forward(p, adj, xs, cfg.dropout, &rng);
    const double loss_sum = masked_cross_entropy(act.probs, labels, splits.train);
    if (!std::isfinite(loss_sum))
      throw NumericError("train_gcn: non-finite training loss at epoch " + std::to_string(epoch));
    const GcnGrads grads =
        gcn_backward(p, adj, xs, act, labels, splits.train, cfg.weight_decay);
    adam_step({&p.w1, &p.w2}, {&grads.w1, &grads.w2}, adam, cfg.learning_rate);

    const GcnActivations eval = gcn_forward(p, adj, xs, 0.0, nullptr);
    const double val_acc = accuracy_on(argmax_rows(eval.probs), labels, splits.val);
    result.curve.push_back(
        {epoch, loss_sum / static_cast<double>(splits.train.size()), val_acc});

    if (val_acc > result.best_val_acc) {
      result.best_val_acc = val_acc;
      result.best_epoch = epoch;
      result.params = p;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

Prediction predict_gcn(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x) {
  GcnActivations act = gcn_forward(p, adj, x, 0.0, nullptr);
  Prediction out;
  out.labels = argmax_rows(act.probs);
  out.probs = std::move(act.probs);
  return out;
}

}  // namespace de2gnn
