#pragma once

#include <span>
#include <string>
#include <vector>

#include "de2gnn/pipeline.hpp"

namespace de2gnn {

// One ablation variant end to end; everything else comes from cfg
// (repeats, seeds, attack). Requires arch de2gnn.
EvalReport run_ablation(const Dataset& ds, const PipelineConfig& cfg, Variant variant);

struct SweepPoint {
  std::string parameter;
  int value = 0;
  EvalReport report;
};

// parameter is "p" or "k"; each value produces a full repeated evaluation.
std::vector<SweepPoint> run_sweep(const Dataset& ds, const PipelineConfig& cfg,
                                  const std::string& parameter, std::span<const int> values);

// header: parameter,value,overall_acc,tail_acc,std_overall,std_tail
void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);

void write_ablation_csv(const std::vector<std::pair<Variant, EvalReport>>& rows,
                        const std::string& path);

}  // namespace de2gnn
