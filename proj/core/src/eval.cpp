#include "de2gnn/eval.hpp"

#include <cstdio>
#include <fstream>

#include "de2gnn/errors.hpp"

namespace de2gnn {

EvalReport run_ablation(const Dataset& ds, const PipelineConfig& cfg, Variant variant) {
  if (cfg.arch != Arch::de2gnn)
    throw ConfigError("run_ablation: ablations apply to the de2gnn arch only");
  PipelineConfig variant_cfg = cfg;
  variant_cfg.variant = variant;
  return run_repeated(ds, variant_cfg);
}

std::vector<SweepPoint> run_sweep(const Dataset& ds, const PipelineConfig& cfg,
                                  const std::string& parameter, std::span<const int> values) {
  if (parameter != "p" && parameter != "k")
    throw ConfigError("run_sweep: parameter must be 'p' or 'k', got '" + parameter + "'");
  if (values.empty()) throw ConfigError("run_sweep: no values given");
  std::vector<SweepPoint> out;
  for (int value : values) {
    PipelineConfig point_cfg = cfg;
    if (parameter == "p")
      point_cfg.p = value;
    else
      point_cfg.k = value;
    SweepPoint point;
    point.parameter = parameter;
    point.value = value;
    point.report = run_repeated(ds, point_cfg);
    out.push_back(std::move(point));
  }
  return out;
}

namespace {

void append_stats(std::ofstream& out, const EvalReport& r) {
  char buf[128];
  const double std_overall = r.repeats ? r.repeats->overall_std : 0.0;
  const double std_tail = r.repeats ? r.repeats->tail_std : 0.0;
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f", r.overall_acc, r.tail_acc, std_overall,
                std_tail);
  out << buf;
}

}  // namespace

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "parameter,value,overall_acc,tail_acc,std_overall,std_tail\n";
  for (const auto& point : points) {
    out << point.parameter << ',' << point.value << ',';
    append_stats(out, point.report);
    out << '\n';
  }
}

void write_ablation_csv(const std::vector<std::pair<Variant, EvalReport>>& rows,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "variant,overall_acc,tail_acc,std_overall,std_tail\n";
  for (const auto& [variant, report] : rows) {
    out << to_string(variant) << ',';
    append_stats(out, report);
    out << '\n';
  }
}

}  // namespace de2gnn
