#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "de2gnn/dataset.hpp"
#include "de2gnn/graph.hpp"

namespace de2gnn {

// Accuracy per degree bucket. Buckets "1".."<tail_bound>" hold exact
// degrees (degree 0 folds into bucket "1"); bucket "over" holds everything
// above tail_bound. Counts partition the masked node set.
struct DegreeBucket {
  long count = 0;
  long correct = 0;

  bool has_acc() const { return count > 0; }
  double acc() const { return static_cast<double>(correct) / static_cast<double>(count); }
};

using DegreeBuckets = std::map<std::string, DegreeBucket>;

double accuracy(std::span<const int> pred, const LabelVector& labels,
                std::span<const NodeId> mask);

// degrees: per-node degree on the chosen reference graph.
DegreeBuckets degree_bucket_accuracy(std::span<const int> pred, const LabelVector& labels,
                                     std::span<const NodeId> mask,
                                     std::span<const int> degrees, int tail_bound);

std::vector<std::string> bucket_keys(int tail_bound);

struct RepeatStats {
  int runs = 0;
  double overall_mean = 0.0, overall_std = 0.0;
  double tail_mean = 0.0, tail_std = 0.0;
  std::map<std::string, double> per_degree_mean;  // mean accuracy per bucket
  std::vector<double> per_run_overall;
  std::vector<double> per_run_tail;
};

struct EvalReport {
  std::string schema = "de2gnn-report-v1";
  std::string dataset;
  std::string arch;     // "de2gnn" | "gcn" | "jaccard"
  std::string variant;  // ablation variant
  std::string attack;   // "none" | "heuristic(rate)" | "file(path)"
  double attack_rate = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string config_json;  // full effective config, serialized
  int tail_bound = 5;
  std::string tail_reference;  // "input" | "purified"
  bool degree_zero_folded = true;

  double overall_acc = 0.0;  // single run, or mean across repeats
  double tail_acc = 0.0;
  DegreeBuckets per_degree;  // single run, or first run's buckets with
                             // aggregate means in repeats.per_degree_mean

  std::optional<double> attention_homo_mean_tail;
  std::optional<double> attention_homo_std_tail;
  std::optional<RepeatStats> repeats;
};

void write_report(const EvalReport& r, const std::string& path);
EvalReport read_report(const std::string& path);
std::string report_to_json(const EvalReport& r);

// population standard deviation
double mean_of(std::span<const double> xs);
double std_of(std::span<const double> xs);

void write_per_degree_csv(const DegreeBuckets& buckets, const std::string& path);

}  // namespace de2gnn
