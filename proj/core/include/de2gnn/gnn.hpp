#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "de2gnn/dataset.hpp"
#include "de2gnn/graph.hpp"
#include "de2gnn/matrix.hpp"

namespace de2gnn {

// Symmetrically normalized adjacency with self-loops: entry (u,v) is
// 1/sqrt((deg(u)+1)(deg(v)+1)) for an edge, and the diagonal is
// 1/(deg(u)+1). Column ids per row are sorted (the diagonal sits inline).
struct NormalizedAdjacency {
  int n = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<NodeId> col;
  std::vector<double> weight;
};

NormalizedAdjacency normalized_adjacency(const Graph& g);
DenseMatrix adj_matmul(const NormalizedAdjacency& a, const DenseMatrix& b);

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  int hidden_dim = 64;
  int max_epochs = 200;
  int patience = 30;
};

void validate_train_config(const TrainConfig& cfg);

// Two-layer GCN: logits = A' relu(A' X W1) W2, dropout on the hidden layer
// during training only.
struct GcnParams {
  DenseMatrix w1;  // d x h
  DenseMatrix w2;  // h x C
};

struct GcnGrads {
  DenseMatrix w1;
  DenseMatrix w2;
};

// Glorot-uniform init, bounds sqrt(6/(fan_in+fan_out)), drawn from rng.
DenseMatrix glorot(int rows, int cols, Rng& rng);

struct GcnActivations {
  DenseMatrix xw1;         // X W1
  DenseMatrix pre_hidden;  // A' X W1
  DenseMatrix hidden;      // relu(pre_hidden), dropout applied when training
  DenseMatrix logits;      // A' hidden W2
  DenseMatrix probs;       // row-softmax(logits)
  std::vector<std::uint8_t> drop_mask;  // nonempty iff dropout was applied
  double keep_prob = 1.0;
};

// rng == nullptr means evaluation mode (no dropout).
GcnActivations gcn_forward(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x,
                           double dropout, Rng* rng);

// Numerically stable row softmax (log-sum-exp shift), applied in place.
void row_softmax(DenseMatrix& m);

// Sum over masked nodes of -ln probs[v, label[v]]. The mask must be
// non-empty. The training loop optimizes the mean (sum / |mask|); the sum is
// what this function reports.
double masked_cross_entropy(const DenseMatrix& probs, const LabelVector& labels,
                            std::span<const NodeId> mask);

// d(mean masked CE)/d(logits): (probs - onehot)/|mask| on masked rows, zero
// elsewhere.
DenseMatrix ce_logit_gradient(const DenseMatrix& probs, const LabelVector& labels,
                              std::span<const NodeId> mask);

// Backward pass from an arbitrary upstream logit gradient. Adds the weight
// decay term wd * W to both parameter gradients.
GcnGrads gcn_backward(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x,
                      const GcnActivations& act, const DenseMatrix& dlogits, double weight_decay);

// Convenience overload matching the training objective directly.
GcnGrads gcn_backward(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x,
                      const GcnActivations& act, const LabelVector& labels,
                      std::span<const NodeId> mask, double weight_decay);

// Adam with bias correction. One state per parameter matrix, updated in the
// order the parameters are passed. Throws NumericError on non-finite
// gradient entries.
struct AdamState {
  std::vector<DenseMatrix> m;
  std::vector<DenseMatrix> v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const std::vector<const DenseMatrix*>& params);
void adam_step(const std::vector<DenseMatrix*>& params, const std::vector<const DenseMatrix*>& grads,
               AdamState& state, double learning_rate);

struct CurvePoint {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // mean masked CE on train
  double val_acc = 0;
};

struct GcnTrainResult {
  GcnParams params;  // snapshot of the best validation epoch
  std::vector<CurvePoint> curve;
  int best_epoch = 0;
  double best_val_acc = 0.0;
};

// Full-batch training with early stopping on best validation accuracy (ties
// keep the earlier epoch). Deterministic for a fixed seed. Throws
// NumericError if the loss becomes non-finite.
GcnTrainResult train_gcn(const Graph& g, const FeatureMatrix& x, const LabelVector& labels,
                         const SplitMasks& splits, const TrainConfig& cfg, std::uint64_t seed);

struct Prediction {
  DenseMatrix probs;
  std::vector<int> labels;  // argmax per row, ties toward smaller class id
};

Prediction predict_gcn(const GcnParams& p, const NormalizedAdjacency& adj, const CsrMatrix& x);

std::vector<int> argmax_rows(const DenseMatrix& m);
double accuracy_on(const std::vector<int>& pred, const LabelVector& labels,
                   std::span<const NodeId> mask);

}  // namespace de2gnn
