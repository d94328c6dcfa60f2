#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "de2gnn/attack.hpp"
#include "de2gnn/augment.hpp"
#include "de2gnn/dataset.hpp"
#include "de2gnn/fusion.hpp"
#include "de2gnn/purify.hpp"
#include "de2gnn/report.hpp"

namespace de2gnn {

struct AttackSpec {
  enum class Kind { none, heuristic, file };
  Kind kind = Kind::none;
  double rate = 0.25;  // heuristic only
  std::string path;    // file only
};

enum class Arch { de2gnn, gcn, jaccard };
enum class Variant { full, no_hetero, no_homo, no_knn, no_attn };
enum class TailReference { input, purified };

std::string to_string(Arch a);
std::string to_string(Variant v);
Arch arch_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

struct PipelineConfig {
  std::string dataset_manifest;  // json key "dataset"
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";  // json key "out"
  double t1 = 0.05;
  double t2 = 0.8;
  int p = 3;
  int k = 5;
  int tail_bound = 5;
  std::string similarity = "auto";  // auto | jaccard | cosine
  std::string knn_metric = "cosine";
  TailReference tail_reference = TailReference::input;
  Arch arch = Arch::de2gnn;
  Variant variant = Variant::full;
  int repeats = 1;
  int mlp_hidden = 64;  // concat head width (no_attn)
  AttackSpec attack;
  TrainConfig surrogate_train;
  TrainConfig model_train;
  std::string sweep_parameter = "p";
  std::vector<int> sweep_values{3, 5, 8, 10};
};

// Strict parse: unknown keys and wrong value types are ConfigErrors.
PipelineConfig config_from_json_text(const std::string& text);
// Canonical serialization (stable key order, every field explicit).
std::string config_to_json_text(const PipelineConfig& cfg);
// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);
void validate_config(const PipelineConfig& cfg);

SimilarityMode resolve_similarity(const std::string& name, const FeatureMatrix& x);

// Seed-independent pipeline stages shared by every repeat: attack,
// purification, kNN graph, tail set, and the degree reference for
// evaluation.
struct PreparedInputs {
  Graph input;  // clean or attacked
  std::optional<PerturbationRecord> perturbation;
  Graph purified;  // == input when purification is skipped
  std::vector<EdgePair> removed;
  std::optional<Graph> knn;
  std::vector<NodeId> tails;
  std::vector<int> degrees;  // on the tail reference graph
};

PreparedInputs prepare_inputs(const Dataset& ds, const PipelineConfig& cfg);

struct RunOutput {
  std::vector<int> predictions;
  DenseMatrix probs;
  AugmentResult augment;  // graph the structural tower trained on + audit
  std::vector<CurvePoint> curve;
  ModelCheckpoint checkpoint;
  double overall_acc = 0.0;
  double tail_acc = 0.0;
  DegreeBuckets buckets;
  std::optional<double> attention_mean_tail;
  std::optional<double> attention_std_tail;
};

RunOutput run_once(const Dataset& ds, const PipelineConfig& cfg, const PreparedInputs& prep,
                   std::uint64_t seed);

// Runs cfg.repeats times with seeds cfg.seed + i and assembles the report
// (aggregate statistics attached when repeats > 1).
EvalReport run_repeated(const Dataset& ds, const PipelineConfig& cfg);
EvalReport run_repeated(const Dataset& ds, const PipelineConfig& cfg,
                        const PreparedInputs& prep);

}  // namespace de2gnn
