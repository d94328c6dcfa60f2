#include "de2gnn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "de2gnn/errors.hpp"

using json = nlohmann::ordered_json;

namespace de2gnn {

std::string to_string(Arch a) {
  switch (a) {
    case Arch::de2gnn: return "de2gnn";
    case Arch::gcn: return "gcn";
    case Arch::jaccard: return "jaccard";
  }
  return "?";
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::no_hetero: return "no_hetero";
    case Variant::no_homo: return "no_homo";
    case Variant::no_knn: return "no_knn";
    case Variant::no_attn: return "no_attn";
  }
  return "?";
}

Arch arch_from_string(const std::string& s) {
  if (s == "de2gnn") return Arch::de2gnn;
  if (s == "gcn") return Arch::gcn;
  if (s == "jaccard") return Arch::jaccard;
  throw ConfigError("unknown arch '" + s + "' (expected de2gnn|gcn|jaccard)");
}

Variant variant_from_string(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "no_hetero") return Variant::no_hetero;
  if (s == "no_homo") return Variant::no_homo;
  if (s == "no_knn") return Variant::no_knn;
  if (s == "no_attn") return Variant::no_attn;
  throw ConfigError("unknown variant '" + s +
                    "' (expected full|no_hetero|no_homo|no_knn|no_attn)");
}

namespace {

double get_number(const json& j, const std::string& at) {
  if (!j.is_number()) throw ConfigError("config: '" + at + "' must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& at) {
  if (!j.is_number_integer()) throw ConfigError("config: '" + at + "' must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& at) {
  if (!j.is_string()) throw ConfigError("config: '" + at + "' must be a string");
  return j.get<std::string>();
}

TrainConfig train_config_from(const json& j, const std::string& at) {
  TrainConfig cfg;
  if (!j.is_object()) throw ConfigError("config: '" + at + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate")
      cfg.learning_rate = get_number(value, at + ".learning_rate");
    else if (key == "weight_decay")
      cfg.weight_decay = get_number(value, at + ".weight_decay");
    else if (key == "dropout")
      cfg.dropout = get_number(value, at + ".dropout");
    else if (key == "hidden_dim")
      cfg.hidden_dim = get_int(value, at + ".hidden_dim");
    else if (key == "max_epochs")
      cfg.max_epochs = get_int(value, at + ".max_epochs");
    else if (key == "patience")
      cfg.patience = get_int(value, at + ".patience");
    else
      throw ConfigError("config: unknown key '" + at + "." + key + "'");
  }
  return cfg;
}

json train_config_to(const TrainConfig& cfg) {
  json j;
  j["learning_rate"] = cfg.learning_rate;
  j["weight_decay"] = cfg.weight_decay;
  j["dropout"] = cfg.dropout;
  j["hidden_dim"] = cfg.hidden_dim;
  j["max_epochs"] = cfg.max_epochs;
  j["patience"] = cfg.patience;
  return j;
}

AttackSpec attack_from(const json& j) {
  AttackSpec spec;
  if (!j.is_object()) throw ConfigError("config: 'attack' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      const std::string kind = get_string(value, "attack.kind");
      if (kind == "none")
        spec.kind = AttackSpec::Kind::none;
      else if (kind == "heuristic")
        spec.kind = AttackSpec::Kind::heuristic;
      else if (kind == "file")
        spec.kind = AttackSpec::Kind::file;
      else
        throw ConfigError("config: attack.kind must be none|heuristic|file, got '" + kind + "'");
    } else if (key == "rate") {
      spec.rate = get_number(value, "attack.rate");
    } else if (key == "path") {
      spec.path = get_string(value, "attack.path");
    } else {
      throw ConfigError("config: unknown key 'attack." + key + "'");
    }
  }
  return spec;
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid json: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  PipelineConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "dataset")
      cfg.dataset_manifest = get_string(value, key);
    else if (key == "seed") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
        throw ConfigError("config: 'seed' must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "out")
      cfg.out_dir = get_string(value, key);
    else if (key == "t1")
      cfg.t1 = get_number(value, key);
    else if (key == "t2")
      cfg.t2 = get_number(value, key);
    else if (key == "p")
      cfg.p = get_int(value, key);
    else if (key == "k")
      cfg.k = get_int(value, key);
    else if (key == "tail_bound")
      cfg.tail_bound = get_int(value, key);
    else if (key == "similarity")
      cfg.similarity = get_string(value, key);
    else if (key == "knn_metric")
      cfg.knn_metric = get_string(value, key);
    else if (key == "tail_reference") {
      const std::string s = get_string(value, key);
      if (s == "input")
        cfg.tail_reference = TailReference::input;
      else if (s == "purified")
        cfg.tail_reference = TailReference::purified;
      else
        throw ConfigError("config: tail_reference must be input|purified, got '" + s + "'");
    } else if (key == "arch")
      cfg.arch = arch_from_string(get_string(value, key));
    else if (key == "variant")
      cfg.variant = variant_from_string(get_string(value, key));
    else if (key == "repeats")
      cfg.repeats = get_int(value, key);
    else if (key == "mlp_hidden")
      cfg.mlp_hidden = get_int(value, key);
    else if (key == "attack")
      cfg.attack = attack_from(value);
    else if (key == "surrogate_train")
      cfg.surrogate_train = train_config_from(value, key);
    else if (key == "model_train")
      cfg.model_train = train_config_from(value, key);
    else if (key == "sweep") {
      if (!value.is_object()) throw ConfigError("config: 'sweep' must be an object");
      for (const auto& [skey, svalue] : value.items()) {
        if (skey == "parameter")
          cfg.sweep_parameter = get_string(svalue, "sweep.parameter");
        else if (skey == "values") {
          if (!svalue.is_array()) throw ConfigError("config: 'sweep.values' must be an array");
          cfg.sweep_values.clear();
          for (const auto& v : svalue) cfg.sweep_values.push_back(get_int(v, "sweep.values[]"));
        } else
          throw ConfigError("config: unknown key 'sweep." + skey + "'");
      }
    } else
      throw ConfigError("config: unknown key '" + key + "'");
  }
  return cfg;
}

std::string config_to_json_text(const PipelineConfig& cfg) {
  json j;
  j["dataset"] = cfg.dataset_manifest;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["t1"] = cfg.t1;
  j["t2"] = cfg.t2;
  j["p"] = cfg.p;
  j["k"] = cfg.k;
  j["tail_bound"] = cfg.tail_bound;
  j["similarity"] = cfg.similarity;
  j["knn_metric"] = cfg.knn_metric;
  j["tail_reference"] = cfg.tail_reference == TailReference::input ? "input" : "purified";
  j["arch"] = to_string(cfg.arch);
  j["variant"] = to_string(cfg.variant);
  j["repeats"] = cfg.repeats;
  j["mlp_hidden"] = cfg.mlp_hidden;
  json attack;
  switch (cfg.attack.kind) {
    case AttackSpec::Kind::none: attack["kind"] = "none"; break;
    case AttackSpec::Kind::heuristic: attack["kind"] = "heuristic"; break;
    case AttackSpec::Kind::file: attack["kind"] = "file"; break;
  }
  attack["rate"] = cfg.attack.rate;
  attack["path"] = cfg.attack.path;
  j["attack"] = std::move(attack);
  j["surrogate_train"] = train_config_to(cfg.surrogate_train);
  j["model_train"] = train_config_to(cfg.model_train);
  json sweep;
  sweep["parameter"] = cfg.sweep_parameter;
  sweep["values"] = cfg.sweep_values;
  j["sweep"] = std::move(sweep);
  return j.dump(2);
}

std::string config_hash(const PipelineConfig& cfg) {
  const std::string text = config_to_json_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.t1 < 0.0 || cfg.t1 >= 1.0) throw ConfigError("config: t1 must be in [0, 1)");
  if (cfg.t2 < 0.0 || cfg.t2 > 1.0) throw ConfigError("config: t2 must be in [0, 1]");
  if (cfg.p < 0) throw ConfigError("config: p must be >= 0");
  if (cfg.k < 1) throw ConfigError("config: k must be >= 1");
  if (cfg.tail_bound < 1) throw ConfigError("config: tail_bound must be >= 1");
  if (cfg.repeats < 1) throw ConfigError("config: repeats must be >= 1");
  if (cfg.mlp_hidden < 1) throw ConfigError("config: mlp_hidden must be >= 1");
  if (cfg.similarity != "auto" && cfg.similarity != "jaccard" && cfg.similarity != "cosine")
    throw ConfigError("config: similarity must be auto|jaccard|cosine");
  if (cfg.knn_metric != "jaccard" && cfg.knn_metric != "cosine")
    throw ConfigError("config: knn_metric must be jaccard|cosine");
  if (cfg.attack.kind == AttackSpec::Kind::heuristic && cfg.attack.rate < 0.0)
    throw ConfigError("config: attack.rate must be >= 0");
  if (cfg.attack.kind == AttackSpec::Kind::file && cfg.attack.path.empty())
    throw ConfigError("config: attack.path is required for attack.kind=file");
  if (cfg.sweep_parameter != "p" && cfg.sweep_parameter != "k")
    throw ConfigError("config: sweep.parameter must be p|k");
  if (cfg.sweep_values.empty()) throw ConfigError("config: sweep.values must be non-empty");
  validate_train_config(cfg.surrogate_train);
  validate_train_config(cfg.model_train);
}

SimilarityMode resolve_similarity(const std::string& name, const FeatureMatrix& x) {
  if (name == "jaccard") {
    if (x.kind != FeatureKind::discrete)
      throw ConfigError("similarity 'jaccard' needs discrete features; use cosine or auto");
    return SimilarityMode::jaccard;
  }
  if (name == "cosine") return SimilarityMode::cosine;
  if (name == "auto")
    return x.kind == FeatureKind::discrete ? SimilarityMode::jaccard : SimilarityMode::cosine;
  throw ConfigError("unknown similarity mode '" + name + "'");
}

PreparedInputs prepare_inputs(const Dataset& ds, const PipelineConfig& cfg) {
  validate_config(cfg);
  PreparedInputs prep;

  switch (cfg.attack.kind) {
    case AttackSpec::Kind::none:
      prep.input = ds.graph;
      break;
    case AttackSpec::Kind::heuristic: {
      const AttackBudget budget = make_budget(cfg.attack.rate, ds.graph.num_edges());
      auto [g, rec] = heuristic_attack(ds, budget, cfg.surrogate_train,
                                       resolve_similarity(cfg.similarity, ds.features), cfg.seed);
      prep.input = std::move(g);
      prep.perturbation = std::move(rec);
      break;
    }
    case AttackSpec::Kind::file: {
      auto [g, rec] = load_perturbed_graph(ds, cfg.attack.path);
      prep.input = std::move(g);
      prep.perturbation = std::move(rec);
      break;
    }
  }

  const bool purify_on =
      cfg.arch == Arch::jaccard ||
      (cfg.arch == Arch::de2gnn && cfg.variant != Variant::no_hetero);
  if (purify_on) {
    PurifyResult res = remove_heterophilic(prep.input, ds.features, cfg.t1,
                                           resolve_similarity(cfg.similarity, ds.features));
    prep.purified = std::move(res.graph);
    prep.removed = std::move(res.removed);
  } else {
    prep.purified = prep.input;
  }

  if (cfg.arch == Arch::de2gnn && cfg.variant != Variant::no_knn)
    prep.knn = build_knn_graph(ds.features, cfg.k,
                               resolve_similarity(cfg.knn_metric, ds.features));

  const Graph& ref =
      cfg.tail_reference == TailReference::input ? prep.input : prep.purified;
  prep.tails = tail_nodes(ref, cfg.tail_bound);
  prep.degrees.resize(static_cast<std::size_t>(ref.num_nodes()));
  for (NodeId v = 0; v < ref.num_nodes(); ++v)
    prep.degrees[static_cast<std::size_t>(v)] = ref.degree(v);
  return prep;
}

namespace {

// mean/std of the homophilic-view attention weight over test tail nodes
void attention_stats(const DenseMatrix& alpha, const std::vector<NodeId>& tails,
                     const std::vector<NodeId>& test, RunOutput& out) {
  std::vector<char> is_tail(static_cast<std::size_t>(alpha.rows), 0);
  for (NodeId v : tails) is_tail[static_cast<std::size_t>(v)] = 1;
  std::vector<double> vals;
  for (NodeId v : test)
    if (is_tail[static_cast<std::size_t>(v)]) vals.push_back(alpha.at(v, 0));
  if (vals.empty()) return;
  out.attention_mean_tail = mean_of(vals);
  out.attention_std_tail = std_of(vals);
}

}  // namespace

RunOutput run_once(const Dataset& ds, const PipelineConfig& cfg, const PreparedInputs& prep,
                   std::uint64_t seed) {
  RunOutput out;

  if (cfg.arch == Arch::gcn || cfg.arch == Arch::jaccard) {
    const Graph& train_graph = cfg.arch == Arch::gcn ? prep.input : prep.purified;
    const GcnTrainResult trained =
        train_gcn(train_graph, ds.features, ds.labels, ds.splits, cfg.model_train, seed);
    const NormalizedAdjacency adj = normalized_adjacency(train_graph);
    const CsrMatrix xs = csr_from_dense(ds.features.values);
    Prediction pred = predict_gcn(trained.params, adj, xs);
    out.predictions = std::move(pred.labels);
    out.probs = std::move(pred.probs);
    out.curve = trained.curve;
    out.checkpoint = checkpoint_of(trained.params);
    out.augment.graph = train_graph;
  } else {
    // structural branch: purified graph, then homophilic additions
    const SurrogateOutput surrogate = train_surrogate(prep.purified, ds.features, ds.labels,
                                                      ds.splits, cfg.surrogate_train, seed);
    if (cfg.variant == Variant::no_homo) {
      out.augment.graph = prep.purified;
    } else {
      out.augment = add_homophilic_links(prep.purified, surrogate, ds.labels, ds.splits.train,
                                         prep.tails, {cfg.p, cfg.t2});
    }

    const CsrMatrix xs = csr_from_dense(ds.features.values);
    if (cfg.variant == Variant::no_knn) {
      const GcnTrainResult trained = train_gcn(out.augment.graph, ds.features, ds.labels,
                                               ds.splits, cfg.model_train, seed);
      const NormalizedAdjacency adj = normalized_adjacency(out.augment.graph);
      Prediction pred = predict_gcn(trained.params, adj, xs);
      out.predictions = std::move(pred.labels);
      out.probs = std::move(pred.probs);
      out.curve = trained.curve;
      out.checkpoint = checkpoint_of(trained.params);
    } else {
      const HeadKind head =
          cfg.variant == Variant::no_attn ? HeadKind::concat_mlp : HeadKind::attention;
      const De2TrainResult trained =
          train_de2(out.augment.graph, *prep.knn, ds.features, ds.labels, ds.splits,
                    cfg.model_train, head, cfg.mlp_hidden, seed);
      const NormalizedAdjacency adj_homo = normalized_adjacency(out.augment.graph);
      const NormalizedAdjacency adj_knn = normalized_adjacency(*prep.knn);
      De2Prediction pred = predict_de2(trained.params, adj_homo, adj_knn, xs);
      out.predictions = std::move(pred.labels);
      out.probs = std::move(pred.probs);
      out.curve = trained.curve;
      out.checkpoint = checkpoint_of(trained.params);
      if (head == HeadKind::attention)
        attention_stats(pred.alpha, prep.tails, ds.splits.test, out);
    }
  }

  out.overall_acc = accuracy(out.predictions, ds.labels, ds.splits.test);
  out.buckets = degree_bucket_accuracy(out.predictions, ds.labels, ds.splits.test, prep.degrees,
                                       cfg.tail_bound);
  // tail accuracy over test nodes on tail-bounded degrees
  std::vector<NodeId> tail_test;
  {
    std::vector<char> is_tail(static_cast<std::size_t>(ds.graph.num_nodes()), 0);
    for (NodeId v : prep.tails) is_tail[static_cast<std::size_t>(v)] = 1;
    for (NodeId v : ds.splits.test)
      if (is_tail[static_cast<std::size_t>(v)]) tail_test.push_back(v);
  }
  out.tail_acc = tail_test.empty() ? 0.0 : accuracy(out.predictions, ds.labels, tail_test);
  return out;
}

EvalReport run_repeated(const Dataset& ds, const PipelineConfig& cfg) {
  return run_repeated(ds, cfg, prepare_inputs(ds, cfg));
}

EvalReport run_repeated(const Dataset& ds, const PipelineConfig& cfg,
                        const PreparedInputs& prep) {
  EvalReport report;
  report.dataset = ds.name;
  report.arch = to_string(cfg.arch);
  report.variant = to_string(cfg.variant);
  switch (cfg.attack.kind) {
    case AttackSpec::Kind::none:
      report.attack = "none";
      report.attack_rate = 0.0;
      break;
    case AttackSpec::Kind::heuristic:
      report.attack = "heuristic";
      report.attack_rate = prep.perturbation ? prep.perturbation->rate : 0.0;
      break;
    case AttackSpec::Kind::file:
      report.attack = "file:" + cfg.attack.path;
      report.attack_rate = prep.perturbation ? prep.perturbation->rate : 0.0;
      break;
  }
  report.seed = cfg.seed;
  report.config_hash = config_hash(cfg);
  report.config_json = config_to_json_text(cfg);
  report.tail_bound = cfg.tail_bound;
  report.tail_reference = cfg.tail_reference == TailReference::input ? "input" : "purified";
  report.degree_zero_folded = true;

  std::vector<double> overall, tail;
  std::vector<double> attn_means;
  std::map<std::string, std::vector<double>> bucket_accs;
  for (int i = 0; i < cfg.repeats; ++i) {
    const RunOutput run = run_once(ds, cfg, prep, cfg.seed + static_cast<std::uint64_t>(i));
    overall.push_back(run.overall_acc);
    tail.push_back(run.tail_acc);
    if (run.attention_mean_tail) attn_means.push_back(*run.attention_mean_tail);
    for (const auto& [key, b] : run.buckets)
      if (b.has_acc()) bucket_accs[key].push_back(b.acc());
    if (i == 0) {
      report.per_degree = run.buckets;
      report.attention_homo_mean_tail = run.attention_mean_tail;
      report.attention_homo_std_tail = run.attention_std_tail;
    }
  }

  if (cfg.repeats == 1) {
    report.overall_acc = overall[0];
    report.tail_acc = tail[0];
  } else {
    report.overall_acc = mean_of(overall);
    report.tail_acc = mean_of(tail);
    RepeatStats stats;
    stats.runs = cfg.repeats;
    stats.overall_mean = mean_of(overall);
    stats.overall_std = std_of(overall);
    stats.tail_mean = mean_of(tail);
    stats.tail_std = std_of(tail);
    for (const auto& [key, accs] : bucket_accs) stats.per_degree_mean[key] = mean_of(accs);
    stats.per_run_overall = overall;
    stats.per_run_tail = tail;
    report.repeats = std::move(stats);
    if (!attn_means.empty()) {
      report.attention_homo_mean_tail = mean_of(attn_means);
      report.attention_homo_std_tail = std_of(attn_means);
    }
  }
  return report;
}

}  // namespace de2gnn
