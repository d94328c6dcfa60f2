#include "de2gnn/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "de2gnn/attack.hpp"
#include "de2gnn/dataset.hpp"
#include "de2gnn/errors.hpp"
#include "de2gnn/eval.hpp"
#include "de2gnn/pipeline.hpp"
#include "de2gnn/report.hpp"

namespace de2gnn {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// --set key=value, with dotted keys for nested objects. The value is parsed
// as JSON when it is valid JSON, otherwise taken as a bare string, so
// `--set attack.kind=heuristic` and `--set t1=0.1` both do the obvious
// thing.
void apply_override(json& root, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key=value, got '" + kv + "'");
  std::string key = kv.substr(0, eq);
  std::string raw = kv.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    auto dot = key.find('.', start);
    std::string part =
        dot == std::string::npos ? key.substr(start) : key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("--set key has an empty segment: '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

struct GlobalArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

PipelineConfig build_config(const GlobalArgs& g) {
  json root = json::object();
  if (!g.config_path.empty()) {
    std::string text = slurp(g.config_path);
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(g.config_path + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(g.config_path + ": top level must be an object");
  }
  for (const auto& kv : g.sets) apply_override(root, kv);
  if (g.seed) root["seed"] = *g.seed;
  if (!g.out.empty()) root["out"] = g.out;
  PipelineConfig cfg = config_from_json_text(root.dump());
  validate_config(cfg);
  if (cfg.dataset_manifest.empty()) throw ConfigError("config: 'dataset' is required");
  return cfg;
}

fs::path prepare_out_dir(const PipelineConfig& cfg) {
  fs::path out(cfg.out_dir);
  fs::create_directories(out);
  spit(out / "config.json", config_to_json_text(cfg));
  return out;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const fs::path& path) {
  std::ostringstream ss;
  ss << "epoch,train_loss,val_acc\n";
  char buf[96];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", pt.epoch, pt.train_loss, pt.val_acc);
    ss << buf;
  }
  spit(path, ss.str());
}

int cmd_prepare(const PipelineConfig& cfg) {
  Dataset ds = load_dataset(cfg.dataset_manifest);
  fs::path out = prepare_out_dir(cfg);
  PreparedInputs prep = prepare_inputs(ds, cfg);

  write_edge_file(prep.input.edge_list(), (out / "g_input.tsv").string());
  write_edge_file(prep.purified.edge_list(), (out / "g_minus_hetero.tsv").string());
  write_edge_file(prep.removed, (out / "removed_edges.tsv").string());

  json info;
  info["config_hash"] = config_hash(cfg);
  info["dataset"] = ds.name;
  info["num_nodes"] = ds.graph.num_nodes();
  info["clean_edges"] = ds.graph.num_edges();
  info["input_edges"] = prep.input.num_edges();
  info["removed_edges"] = prep.removed.size();
  info["purified_edges"] = prep.purified.num_edges();
  info["tail_nodes"] = prep.tails.size();
  if (prep.perturbation) {
    write_perturbation_json(*prep.perturbation, cfg.attack.rate,
                            (out / "perturbation.json").string());
    info["attack_rate_realized"] = prep.perturbation->rate;
  }
  if (prep.knn) {
    write_edge_file(prep.knn->edge_list(), (out / "g_knn.tsv").string());
    info["knn_edges"] = prep.knn->num_edges();
  }
  if (cfg.arch == Arch::de2gnn && cfg.variant != Variant::no_homo) {
    SurrogateOutput sur =
        train_surrogate(prep.purified, ds.features, ds.labels, ds.splits, cfg.surrogate_train,
                        cfg.seed);
    AugmentResult aug = add_homophilic_links(prep.purified, sur, ds.labels, ds.splits.train,
                                             prep.tails, AugmentConfig{cfg.p, cfg.t2});
    write_edge_file(aug.graph.edge_list(), (out / "g_plus_homo.tsv").string());
    write_added_edges(aug.added, (out / "added_edges.tsv").string());
    info["added_edges"] = aug.added.size();
    info["augmented_edges"] = aug.graph.num_edges();
  }
  spit(out / "prepare.json", info.dump(2) + "\n");
  return 0;
}

int cmd_attack(const PipelineConfig& cfg) {
  if (cfg.attack.kind == AttackSpec::Kind::none)
    throw ConfigError("attack command needs attack.kind \"heuristic\" or \"file\"");
  Dataset ds = load_dataset(cfg.dataset_manifest);
  fs::path out = prepare_out_dir(cfg);

  std::pair<Graph, PerturbationRecord> res =
      cfg.attack.kind == AttackSpec::Kind::heuristic
          ? heuristic_attack(ds, make_budget(cfg.attack.rate, ds.graph.num_edges()),
                             cfg.surrogate_train, resolve_similarity(cfg.similarity, ds.features),
                             cfg.seed)
          : load_perturbed_graph(ds, cfg.attack.path);

  write_edge_file(res.first.edge_list(), (out / "perturbed_edges.tsv").string());
  double requested = cfg.attack.kind == AttackSpec::Kind::heuristic ? cfg.attack.rate : res.second.rate;
  write_perturbation_json(res.second, requested, (out / "perturbation.json").string());
  return 0;
}

int cmd_train(const PipelineConfig& cfg) {
  Dataset ds = load_dataset(cfg.dataset_manifest);
  fs::path out = prepare_out_dir(cfg);
  PreparedInputs prep = prepare_inputs(ds, cfg);
  RunOutput run = run_once(ds, cfg, prep, cfg.seed);

  write_checkpoint(run.checkpoint, (out / "checkpoint.bin").string());
  write_curve_csv(run.curve, out / "curve.csv");
  if (!run.augment.added.empty())
    write_added_edges(run.augment.added, (out / "added_edges.tsv").string());

  json info;
  info["config_hash"] = config_hash(cfg);
  info["dataset"] = ds.name;
  info["arch"] = to_string(cfg.arch);
  info["variant"] = to_string(cfg.variant);
  info["seed"] = cfg.seed;
  info["epochs_run"] = run.curve.size();
  double best = 0.0;
  int best_epoch = 0;
  for (const auto& pt : run.curve)
    if (pt.val_acc > best) best = pt.val_acc, best_epoch = pt.epoch;
  info["best_epoch"] = best_epoch;
  info["best_val_acc"] = best;
  info["overall_acc"] = run.overall_acc;
  info["tail_acc"] = run.tail_acc;
  spit(out / "train.json", info.dump(2) + "\n");
  return 0;
}

int cmd_evaluate(const PipelineConfig& cfg) {
  Dataset ds = load_dataset(cfg.dataset_manifest);
  fs::path out = prepare_out_dir(cfg);
  EvalReport report = run_repeated(ds, cfg);
  write_report(report, (out / "report.json").string());
  write_per_degree_csv(report.per_degree, (out / "per_degree.csv").string());
  std::printf("%s %s overall %.4f tail %.4f\n", report.dataset.c_str(), report.arch.c_str(),
              report.overall_acc, report.tail_acc);
  return 0;
}

int cmd_ablate(const PipelineConfig& cfg) {
  if (cfg.arch != Arch::de2gnn) throw ConfigError("ablate requires arch \"de2gnn\"");
  Dataset ds = load_dataset(cfg.dataset_manifest);
  fs::path out = prepare_out_dir(cfg);
  const Variant variants[] = {Variant::full, Variant::no_hetero, Variant::no_homo,
                              Variant::no_knn, Variant::no_attn};
  std::vector<std::pair<Variant, EvalReport>> rows;
  for (Variant v : variants) {
    EvalReport r = run_ablation(ds, cfg, v);
    write_report(r, (out / ("report_" + to_string(v) + ".json")).string());
    std::printf("%-10s overall %.4f tail %.4f\n", to_string(v).c_str(), r.overall_acc,
                r.tail_acc);
    rows.emplace_back(v, std::move(r));
  }
  write_ablation_csv(rows, (out / "ablation.csv").string());
  return 0;
}

int cmd_sweep(const PipelineConfig& cfg) {
  Dataset ds = load_dataset(cfg.dataset_manifest);
  fs::path out = prepare_out_dir(cfg);
  std::vector<SweepPoint> points = run_sweep(ds, cfg, cfg.sweep_parameter, cfg.sweep_values);
  for (const auto& pt : points) {
    char name[64];
    std::snprintf(name, sizeof(name), "report_%s_%d.json", pt.parameter.c_str(), pt.value);
    write_report(pt.report, (out / name).string());
    std::printf("%s=%d overall %.4f tail %.4f\n", pt.parameter.c_str(), pt.value,
                pt.report.overall_acc, pt.report.tail_acc);
  }
  write_sweep_csv(points, (out / "sweep.csv").string());
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"defense and debiasing pipeline for GNNs under structural attack"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--set", g.sets, "override a config key (key=value, dotted keys nest)")
      ->take_all();
  std::uint64_t seed_arg = 0;
  auto* seed_opt = app.add_option("--seed", seed_arg, "override the base seed");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--quiet", g.quiet, "suppress warnings");

  auto* prepare = app.add_subcommand("prepare", "run the graph stages and write every artifact");
  auto* attack = app.add_subcommand("attack", "write a perturbed edge file and its record");
  auto* train = app.add_subcommand("train", "train one model; write checkpoint and curve");
  auto* evaluate = app.add_subcommand("evaluate", "train and score; write report.json");
  auto* ablate = app.add_subcommand("ablate", "evaluate every pipeline variant");
  auto* sweep = app.add_subcommand("sweep", "evaluate across sweep_values of p or k");
  for (auto* sub : {prepare, attack, train, evaluate, ablate, sweep}) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*seed_opt) g.seed = seed_arg;
  set_quiet(g.quiet);

  try {
    PipelineConfig cfg = build_config(g);
    if (prepare->parsed()) return cmd_prepare(cfg);
    if (attack->parsed()) return cmd_attack(cfg);
    if (train->parsed()) return cmd_train(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    if (ablate->parsed()) return cmd_ablate(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  }
}

}  // namespace de2gnn
