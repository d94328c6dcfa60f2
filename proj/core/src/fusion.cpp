#include "de2gnn/fusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "de2gnn/errors.hpp"

namespace de2gnn {

namespace {

DenseMatrix concat_cols(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows, a.cols + b.cols);
  for (int i = 0; i < a.rows; ++i) {
    std::copy_n(a.row(i), a.cols, out.row(i));
    std::copy_n(b.row(i), b.cols, out.row(i) + a.cols);
  }
  return out;
}

}  // namespace

De2Activations de2_forward(const De2Params& p, const NormalizedAdjacency& adj_homo,
                           const NormalizedAdjacency& adj_knn, const CsrMatrix& x, double dropout,
                           Rng* rng) {
  De2Activations act;
  act.homo = gcn_forward(p.tower_homo, adj_homo, x, dropout, rng);
  act.knn = gcn_forward(p.tower_knn, adj_knn, x, dropout, rng);
  const DenseMatrix& h1 = act.homo.logits;
  const DenseMatrix& h2 = act.knn.logits;
  act.concat = concat_cols(h1, h2);

  if (p.head == HeadKind::attention) {
    act.pre_score = matmul(act.concat, p.w_attn);
    act.tanh_score = act.pre_score;
    for (auto& v : act.tanh_score.data) v = std::tanh(v);
    act.alpha = act.tanh_score;
    row_softmax(act.alpha);
    act.logits = DenseMatrix(h1.rows, h1.cols);
    for (int i = 0; i < h1.rows; ++i) {
      const double a0 = act.alpha.at(i, 0);
      const double a1 = act.alpha.at(i, 1);
      const double* r1 = h1.row(i);
      const double* r2 = h2.row(i);
      double* y = act.logits.row(i);
      for (int c = 0; c < h1.cols; ++c) y[c] = a0 * r1[c] + a1 * r2[c];
    }
  } else {
    act.mlp_pre = matmul(act.concat, p.mlp_w1);
    act.mlp_hidden = act.mlp_pre;
    for (auto& v : act.mlp_hidden.data) v = v > 0.0 ? v : 0.0;
    act.logits = matmul(act.mlp_hidden, p.mlp_w2);
  }
  act.probs = act.logits;
  row_softmax(act.probs);
  return act;
}

De2Grads de2_backward(const De2Params& p, const NormalizedAdjacency& adj_homo,
                      const NormalizedAdjacency& adj_knn, const CsrMatrix& x,
                      const De2Activations& act, const DenseMatrix& dlogits, double weight_decay) {
  const DenseMatrix& h1 = act.homo.logits;
  const DenseMatrix& h2 = act.knn.logits;
  const int n = h1.rows;
  const int c = h1.cols;
  DenseMatrix d_h1(n, c);
  DenseMatrix d_h2(n, c);
  De2Grads g;

  if (p.head == HeadKind::attention) {
    DenseMatrix d_alpha(n, 2);
    for (int i = 0; i < n; ++i) {
      const double a0 = act.alpha.at(i, 0);
      const double a1 = act.alpha.at(i, 1);
      const double* dy = dlogits.row(i);
      const double* r1 = h1.row(i);
      const double* r2 = h2.row(i);
      double* g1 = d_h1.row(i);
      double* g2 = d_h2.row(i);
      double da0 = 0.0, da1 = 0.0;
      for (int j = 0; j < c; ++j) {
        g1[j] = a0 * dy[j];
        g2[j] = a1 * dy[j];
        da0 += dy[j] * r1[j];
        da1 += dy[j] * r2[j];
      }
      d_alpha.at(i, 0) = da0;
      d_alpha.at(i, 1) = da1;
    }
    // softmax rows, then tanh
    DenseMatrix d_pre(n, 2);
    for (int i = 0; i < n; ++i) {
      const double a0 = act.alpha.at(i, 0);
      const double a1 = act.alpha.at(i, 1);
      const double dot = a0 * d_alpha.at(i, 0) + a1 * d_alpha.at(i, 1);
      const double dt0 = a0 * (d_alpha.at(i, 0) - dot);
      const double dt1 = a1 * (d_alpha.at(i, 1) - dot);
      const double t0 = act.tanh_score.at(i, 0);
      const double t1 = act.tanh_score.at(i, 1);
      d_pre.at(i, 0) = dt0 * (1.0 - t0 * t0);
      d_pre.at(i, 1) = dt1 * (1.0 - t1 * t1);
    }
    g.w_attn = matmul_at_b(act.concat, d_pre);
    const DenseMatrix d_concat = matmul_a_bt(d_pre, p.w_attn);
    for (int i = 0; i < n; ++i) {
      const double* dc = d_concat.row(i);
      double* g1 = d_h1.row(i);
      double* g2 = d_h2.row(i);
      for (int j = 0; j < c; ++j) {
        g1[j] += dc[j];
        g2[j] += dc[j + c];
      }
    }
    if (weight_decay != 0.0) axpy(g.w_attn, p.w_attn, weight_decay);
  } else {
    DenseMatrix d_hidden = matmul_a_bt(dlogits, p.mlp_w2);
    g.mlp_w2 = matmul_at_b(act.mlp_hidden, dlogits);
    for (std::size_t i = 0; i < d_hidden.data.size(); ++i)
      if (act.mlp_pre.data[i] <= 0.0) d_hidden.data[i] = 0.0;
    g.mlp_w1 = matmul_at_b(act.concat, d_hidden);
    const DenseMatrix d_concat = matmul_a_bt(d_hidden, p.mlp_w1);
    for (int i = 0; i < n; ++i) {
      const double* dc = d_concat.row(i);
      double* g1 = d_h1.row(i);
      double* g2 = d_h2.row(i);
      for (int j = 0; j < c; ++j) {
        g1[j] += dc[j];
        g2[j] += dc[j + c];
      }
    }
    if (weight_decay != 0.0) {
      axpy(g.mlp_w1, p.mlp_w1, weight_decay);
      axpy(g.mlp_w2, p.mlp_w2, weight_decay);
    }
  }

  g.tower_homo = gcn_backward(p.tower_homo, adj_homo, x, act.homo, d_h1, weight_decay);
  g.tower_knn = gcn_backward(p.tower_knn, adj_knn, x, act.knn, d_h2, weight_decay);
  return g;
}

De2TrainResult train_de2(const Graph& g_homo, const Graph& g_knn, const FeatureMatrix& x,
                         const LabelVector& labels, const SplitMasks& splits,
                         const TrainConfig& cfg, HeadKind head, int mlp_hidden,
                         std::uint64_t seed) {
  validate_train_config(cfg);
  if (g_homo.num_nodes() != g_knn.num_nodes())
    throw DataError("train_de2: tower graphs have different node counts");
  const NormalizedAdjacency adj_homo = normalized_adjacency(g_homo);
  const NormalizedAdjacency adj_knn = normalized_adjacency(g_knn);
  const CsrMatrix xs = csr_from_dense(x.values);
  Rng rng(seed);
  const int num_classes = labels.num_classes;

  De2Params p;
  p.head = head;
  p.tower_homo = {glorot(x.dim(), cfg.hidden_dim, rng),
                  glorot(cfg.hidden_dim, num_classes, rng)};
  p.tower_knn = {glorot(x.dim(), cfg.hidden_dim, rng),
                 glorot(cfg.hidden_dim, num_classes, rng)};
  std::vector<DenseMatrix*> params{&p.tower_homo.w1, &p.tower_homo.w2, &p.tower_knn.w1,
                                   &p.tower_knn.w2};
  if (head == HeadKind::attention) {
    p.w_attn = DenseMatrix(2 * num_classes, 2);  // zero start: both views equal
    params.push_back(&p.w_attn);
  } else {
    if (mlp_hidden < 1) throw ConfigError("train_de2: mlp_hidden must be >= 1");
    p.mlp_w1 = glorot(2 * num_classes, mlp_hidden, rng);
    p.mlp_w2 = glorot(mlp_hidden, num_classes, rng);
    params.push_back(&p.mlp_w1);
    params.push_back(&p.mlp_w2);
  }

  std::vector<const DenseMatrix*> param_view(params.begin(), params.end());
  AdamState adam = make_adam_state(param_view);

  De2TrainResult result;
  result.best_val_acc = -1.0;
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    De2Activations act = de2_forward(p, adj_homo, adj_knn, xs, cfg.dropout, &rng);
    const double loss_sum = masked_cross_entropy(act.probs, labels, splits.train);
    if (!std::isfinite(loss_sum))
      throw NumericError("train_de2: non-finite training loss at epoch " + std::to_string(epoch));
    const DenseMatrix dlogits = ce_logit_gradient(act.probs, labels, splits.train);
    De2Grads grads = de2_backward(p, adj_homo, adj_knn, xs, act, dlogits, cfg.weight_decay);

    std::vector<const DenseMatrix*> grad_list{&grads.tower_homo.w1, &grads.tower_homo.w2,
                                              &grads.tower_knn.w1, &grads.tower_knn.w2};
    if (head == HeadKind::attention) {
      grad_list.push_back(&grads.w_attn);
    } else {
      grad_list.push_back(&grads.mlp_w1);
      grad_list.push_back(&grads.mlp_w2);
    }
    adam_step(params, grad_list, adam, cfg.learning_rate);

    const De2Activations eval = de2_forward(p, adj_homo, adj_knn, xs, 0.0, nullptr);
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

De2Prediction predict_de2(const De2Params& p, const NormalizedAdjacency& adj_homo,
                          const NormalizedAdjacency& adj_knn, const CsrMatrix& x) {
  De2Activations act = de2_forward(p, adj_homo, adj_knn, x, 0.0, nullptr);
  De2Prediction out;
  out.labels = argmax_rows(act.probs);
  out.probs = std::move(act.probs);
  out.alpha = std::move(act.alpha);
  return out;
}

ModelCheckpoint checkpoint_of(const GcnParams& p) {
  return {ModelCheckpoint::Kind::gcn, {p.w1, p.w2}};
}

ModelCheckpoint checkpoint_of(const De2Params& p) {
  if (p.head == HeadKind::attention)
    return {ModelCheckpoint::Kind::de2_attention,
            {p.tower_homo.w1, p.tower_homo.w2, p.tower_knn.w1, p.tower_knn.w2, p.w_attn}};
  return {ModelCheckpoint::Kind::de2_concat,
          {p.tower_homo.w1, p.tower_homo.w2, p.tower_knn.w1, p.tower_knn.w2, p.mlp_w1, p.mlp_w2}};
}

namespace {

constexpr char kMagic[4] = {'D', 'E', '2', 'G'};
constexpr std::uint32_t kVersion = 1;

std::size_t matrix_count(ModelCheckpoint::Kind kind) {
  switch (kind) {
    case ModelCheckpoint::Kind::gcn: return 2;
    case ModelCheckpoint::Kind::de2_attention: return 5;
    case ModelCheckpoint::Kind::de2_concat: return 6;
  }
  throw DataError("checkpoint: unknown model kind");
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw DataError("checkpoint truncated: " + path);
  return v;
}

}  // namespace

void write_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint format is little-endian");
  if (ckpt.matrices.size() != matrix_count(ckpt.kind))
    throw DataError("checkpoint: wrong matrix count for model kind");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.kind));
  for (const auto& m : ckpt.matrices) {
    put_u32(out, static_cast<std::uint32_t>(m.rows));
    put_u32(out, static_cast<std::uint32_t>(m.cols));
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  }
  if (!out) throw DataError("short write: " + path);
}

ModelCheckpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw DataError("not a model checkpoint (bad magic): " + path);
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  const std::uint32_t kind_raw = get_u32(in, path);
  if (kind_raw > 2) throw DataError("unknown model kind in checkpoint: " + path);
  ModelCheckpoint ckpt;
  ckpt.kind = static_cast<ModelCheckpoint::Kind>(kind_raw);
  for (std::size_t k = 0; k < matrix_count(ckpt.kind); ++k) {
    const std::uint32_t rows = get_u32(in, path);
    const std::uint32_t cols = get_u32(in, path);
    DenseMatrix m(static_cast<int>(rows), static_cast<int>(cols));
    if (!in.read(reinterpret_cast<char*>(m.data.data()),
                 static_cast<std::streamsize>(m.data.size() * sizeof(double))))
      throw DataError("checkpoint truncated: " + path);
    ckpt.matrices.push_back(std::move(m));
  }
  return ckpt;
}

}  // namespace de2gnn
