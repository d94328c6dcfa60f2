#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "de2gnn/gnn.hpp"

namespace de2gnn {

enum class HeadKind { attention, concat_mlp };

// Two GCN towers over different graphs of the same node set (structural
// view and feature-kNN view), fused at the logit level. The attention head
// computes per-node view weights alpha = row_softmax(tanh([H1|H2] W_attn))
// and mixes Y = alpha0*H1 + alpha1*H2. The concat head replaces attention
// with relu([H1|H2] Wm1) Wm2.
struct De2Params {
  GcnParams tower_homo;
  GcnParams tower_knn;
  HeadKind head = HeadKind::attention;
  DenseMatrix w_attn;  // 2C x 2
  DenseMatrix mlp_w1;  // 2C x mlp_hidden
  DenseMatrix mlp_w2;  // mlp_hidden x C
};

struct De2Grads {
  GcnGrads tower_homo;
  GcnGrads tower_knn;
  DenseMatrix w_attn;
  DenseMatrix mlp_w1;
  DenseMatrix mlp_w2;
};

struct De2Activations {
  GcnActivations homo;
  GcnActivations knn;
  DenseMatrix concat;      // n x 2C
  DenseMatrix pre_score;   // n x 2, before tanh (attention head)
  DenseMatrix tanh_score;  // n x 2
  DenseMatrix alpha;       // n x 2, rows sum to 1
  DenseMatrix mlp_pre;     // n x mlp_hidden (concat head)
  DenseMatrix mlp_hidden;  // relu(mlp_pre)
  DenseMatrix logits;      // n x C
  DenseMatrix probs;
};

// rng == nullptr disables dropout (evaluation). Dropout draws one mask per
// tower per call, homo tower first.
De2Activations de2_forward(const De2Params& p, const NormalizedAdjacency& adj_homo,
                           const NormalizedAdjacency& adj_knn, const CsrMatrix& x, double dropout,
                           Rng* rng);

De2Grads de2_backward(const De2Params& p, const NormalizedAdjacency& adj_homo,
                      const NormalizedAdjacency& adj_knn, const CsrMatrix& x,
                      const De2Activations& act, const DenseMatrix& dlogits, double weight_decay);

struct De2TrainResult {
  De2Params params;
  std::vector<CurvePoint> curve;
  int best_epoch = 0;
  double best_val_acc = 0.0;
};

// Joint Adam over both towers and the head. Tower weights are Glorot; the
// attention weight starts at zero (both views equally weighted until the
// head learns otherwise); the MLP head is Glorot since zero would never
// receive gradient through the relu.
De2TrainResult train_de2(const Graph& g_homo, const Graph& g_knn, const FeatureMatrix& x,
                         const LabelVector& labels, const SplitMasks& splits,
                         const TrainConfig& cfg, HeadKind head, int mlp_hidden,
                         std::uint64_t seed);

struct De2Prediction {
  DenseMatrix probs;
  std::vector<int> labels;
  DenseMatrix alpha;  // empty for the concat head
};

De2Prediction predict_de2(const De2Params& p, const NormalizedAdjacency& adj_homo,
                          const NormalizedAdjacency& adj_knn, const CsrMatrix& x);

// Binary checkpoint: magic "DE2G", u32 version, u32 model kind, then each
// matrix as u32 rows, u32 cols, row-major float64 little-endian. Matrix
// order: gcn -> w1, w2; de2 attention -> homo.w1, homo.w2, knn.w1, knn.w2,
// w_attn; de2 concat -> homo.w1, homo.w2, knn.w1, knn.w2, mlp_w1, mlp_w2.
struct ModelCheckpoint {
  enum class Kind : std::uint32_t { gcn = 0, de2_attention = 1, de2_concat = 2 };
  Kind kind = Kind::gcn;
  std::vector<DenseMatrix> matrices;
};

ModelCheckpoint checkpoint_of(const GcnParams& p);
ModelCheckpoint checkpoint_of(const De2Params& p);
void write_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint read_checkpoint(const std::string& path);

}  // namespace de2gnn
