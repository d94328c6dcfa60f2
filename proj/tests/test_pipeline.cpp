#include <algorithm>
#include <set>

#include <doctest.h>

#include "de2gnn/errors.hpp"
#include "de2gnn/eval.hpp"
#include "de2gnn/pipeline.hpp"
#include "helpers.hpp"

using namespace de2gnn;

namespace {

// small training budget so pipeline tests stay fast
void shrink(PipelineConfig& cfg) {
  for (TrainConfig* t : {&cfg.surrogate_train, &cfg.model_train}) {
    t->hidden_dim = 16;
    t->max_epochs = 25;
    t->patience = 25;
  }
  cfg.k = 3;
  cfg.p = 2;
  cfg.t2 = 0.5;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config defaults and round trip") {
  PipelineConfig cfg = config_from_json_text("{}");
  CHECK(cfg.seed == 1);
  CHECK(cfg.t1 == 0.05);
  CHECK(cfg.t2 == 0.8);
  CHECK(cfg.p == 3);
  CHECK(cfg.k == 5);
  CHECK(cfg.tail_bound == 5);
  CHECK(cfg.similarity == "auto");
  CHECK(cfg.arch == Arch::de2gnn);
  CHECK(cfg.variant == Variant::full);
  CHECK(cfg.repeats == 1);
  CHECK(cfg.attack.kind == AttackSpec::Kind::none);
  CHECK(cfg.model_train.learning_rate == 0.01);
  CHECK(cfg.model_train.weight_decay == 5e-4);
  CHECK(cfg.model_train.dropout == 0.5);
  CHECK(cfg.model_train.hidden_dim == 64);
  CHECK(cfg.model_train.max_epochs == 200);
  CHECK(cfg.model_train.patience == 30);
  CHECK(cfg.sweep_parameter == "p");
  CHECK(cfg.sweep_values == std::vector<int>{3, 5, 8, 10});

  // canonical serialization is a fixed point
  std::string canon = config_to_json_text(cfg);
  CHECK(config_to_json_text(config_from_json_text(canon)) == canon);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_WITH_AS(config_from_json_text(R"({"t_one":0.1})"),
                       doctest::Contains("unknown key 't_one'"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json_text(R"({"attack":{"speed":1}})"),
                       doctest::Contains("attack.speed"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"t1":"high"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"seed":-1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("[1,2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"arch":"mlp"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"variant":"bare"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"tail_reference":"attacked"})"), ConfigError);
}

TEST_CASE("config hash tracks content") {
  PipelineConfig a = config_from_json_text("{}");
  PipelineConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.t1 = 0.06;
  CHECK(config_hash(a) != config_hash(b));
  PipelineConfig c = a;
  c.attack.kind = AttackSpec::Kind::heuristic;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("config validation") {
  PipelineConfig cfg = config_from_json_text("{}");
  CHECK_NOTHROW(validate_config(cfg));

  auto reject = [](auto mutate) {
    PipelineConfig bad = config_from_json_text("{}");
    mutate(bad);
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
  };
  reject([](PipelineConfig& c) { c.t1 = -0.1; });
  reject([](PipelineConfig& c) { c.t1 = 1.0; });
  reject([](PipelineConfig& c) { c.t2 = 1.5; });
  reject([](PipelineConfig& c) { c.p = -1; });
  reject([](PipelineConfig& c) { c.k = 0; });
  reject([](PipelineConfig& c) { c.tail_bound = 0; });
  reject([](PipelineConfig& c) { c.repeats = 0; });
  reject([](PipelineConfig& c) { c.mlp_hidden = 0; });
  reject([](PipelineConfig& c) { c.similarity = "hamming"; });
  reject([](PipelineConfig& c) { c.knn_metric = "euclid"; });
  reject([](PipelineConfig& c) { c.sweep_parameter = "t1"; });
  reject([](PipelineConfig& c) { c.sweep_values.clear(); });
  reject([](PipelineConfig& c) {
    c.attack.kind = AttackSpec::Kind::file;
    c.attack.path.clear();
  });
  reject([](PipelineConfig& c) {
    c.attack.kind = AttackSpec::Kind::heuristic;
    c.attack.rate = -0.5;
  });
  reject([](PipelineConfig& c) { c.model_train.dropout = 1.0; });
  reject([](PipelineConfig& c) { c.surrogate_train.max_epochs = 0; });
}

TEST_CASE("similarity resolution") {
  Dataset ds = testutil::tiny_dataset();
  CHECK(resolve_similarity("auto", ds.features) == SimilarityMode::jaccard);
  CHECK(resolve_similarity("cosine", ds.features) == SimilarityMode::cosine);
  ds.features.kind = FeatureKind::continuous;
  CHECK(resolve_similarity("auto", ds.features) == SimilarityMode::cosine);
  CHECK_THROWS_AS(resolve_similarity("jaccard", ds.features), ConfigError);
}

TEST_CASE("prepared inputs per arch and variant") {
  Dataset ds = testutil::small_synth();
  PipelineConfig cfg;
  shrink(cfg);
  cfg.t1 = 0.02;

  SUBCASE("full de2gnn stages") {
    PreparedInputs prep = prepare_inputs(ds, cfg);
    CHECK(prep.input.num_edges() == ds.graph.num_edges());
    CHECK_FALSE(prep.perturbation.has_value());
    CHECK(prep.purified.num_edges() + static_cast<std::int64_t>(prep.removed.size()) ==
          prep.input.num_edges());
    REQUIRE(prep.knn.has_value());
    CHECK(prep.knn->num_edges() >= ds.graph.num_nodes() * 3 / 2);
    // degrees measured on the input graph by default
    for (NodeId v = 0; v < ds.graph.num_nodes(); ++v)
      CHECK(prep.degrees[v] == prep.input.degree(v));
    for (NodeId v : prep.tails) CHECK(prep.input.degree(v) <= cfg.tail_bound);

    // removed edges are really gone
    for (auto [u, v] : prep.removed) CHECK_FALSE(prep.purified.has_edge(u, v));
  }

  SUBCASE("gcn arch skips every graph stage") {
    cfg.arch = Arch::gcn;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    CHECK(prep.purified.edge_list() == prep.input.edge_list());
    CHECK(prep.removed.empty());
    CHECK_FALSE(prep.knn.has_value());
  }

  SUBCASE("jaccard arch purifies but builds no knn view") {
    cfg.arch = Arch::jaccard;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    CHECK(prep.purified.num_edges() < prep.input.num_edges());
    CHECK_FALSE(prep.knn.has_value());
  }

  SUBCASE("no_hetero keeps the input graph") {
    cfg.variant = Variant::no_hetero;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    CHECK(prep.purified.edge_list() == prep.input.edge_list());
    CHECK(prep.knn.has_value());
  }

  SUBCASE("no_knn drops the feature view") {
    cfg.variant = Variant::no_knn;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    CHECK_FALSE(prep.knn.has_value());
  }

  SUBCASE("tail reference can follow the purified graph") {
    cfg.tail_reference = TailReference::purified;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    for (NodeId v = 0; v < ds.graph.num_nodes(); ++v)
      CHECK(prep.degrees[v] == prep.purified.degree(v));
    for (NodeId v : prep.tails) CHECK(prep.purified.degree(v) <= cfg.tail_bound);
  }

  SUBCASE("heuristic attack enlarges the input graph") {
    cfg.attack.kind = AttackSpec::Kind::heuristic;
    cfg.attack.rate = 0.1;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    REQUIRE(prep.perturbation.has_value());
    CHECK(prep.input.num_edges() ==
          ds.graph.num_edges() + static_cast<std::int64_t>(prep.perturbation->added.size()));
    CHECK(prep.perturbation->added.size() ==
          static_cast<std::size_t>(make_budget(0.1, ds.graph.num_edges()).delta));
  }
}

TEST_CASE("run_once accuracy above chance for every arch") {
  Dataset ds = testutil::small_synth();
  PipelineConfig cfg;
  shrink(cfg);
  const double chance = 1.0 / ds.labels.num_classes;

  for (Arch arch : {Arch::gcn, Arch::jaccard, Arch::de2gnn}) {
    cfg.arch = arch;
    PreparedInputs prep = prepare_inputs(ds, cfg);
    RunOutput run = run_once(ds, cfg, prep, 7);
    CHECK(run.overall_acc > chance + 0.2);
    CHECK(static_cast<int>(run.predictions.size()) == ds.graph.num_nodes());
    if (arch == Arch::de2gnn) {
      CHECK(run.attention_mean_tail.has_value());
      CHECK(run.checkpoint.kind == ModelCheckpoint::Kind::de2_attention);
      CHECK(run.augment.graph.num_edges() >= prep.purified.num_edges());
    } else {
      CHECK(run.checkpoint.kind == ModelCheckpoint::Kind::gcn);
    }
    CHECK_FALSE(run.curve.empty());
    long bucket_total = 0;
    for (const auto& [key, b] : run.buckets) bucket_total += b.count;
    CHECK(bucket_total == static_cast<long>(ds.splits.test.size()));
  }
}

TEST_CASE("no_attn uses the concat head") {
  Dataset ds = testutil::small_synth();
  PipelineConfig cfg;
  shrink(cfg);
  cfg.variant = Variant::no_attn;
  PreparedInputs prep = prepare_inputs(ds, cfg);
  RunOutput run = run_once(ds, cfg, prep, 7);
  CHECK(run.checkpoint.kind == ModelCheckpoint::Kind::de2_concat);
  CHECK_FALSE(run.attention_mean_tail.has_value());
}

TEST_CASE("repeated runs aggregate statistics") {
  Dataset ds = testutil::small_synth();
  PipelineConfig cfg;
  shrink(cfg);
  cfg.repeats = 3;
  cfg.arch = Arch::gcn;
  EvalReport r = run_repeated(ds, cfg);
  REQUIRE(r.repeats.has_value());
  CHECK(r.repeats->runs == 3);
  REQUIRE(r.repeats->per_run_overall.size() == 3);
  CHECK(r.overall_acc == mean_of(r.repeats->per_run_overall));
  CHECK(r.tail_acc == mean_of(r.repeats->per_run_tail));
  // distinct seeds give distinct runs
  bool all_same = r.repeats->per_run_overall[0] == r.repeats->per_run_overall[1] &&
                  r.repeats->per_run_overall[1] == r.repeats->per_run_overall[2];
  CHECK_FALSE(all_same);
  CHECK(r.schema == "de2gnn-report-v1");
  CHECK(r.arch == "gcn");
  CHECK(r.attack == "none");
  CHECK(r.config_hash == config_hash(cfg));

  // byte-identical when rerun
  EvalReport again = run_repeated(ds, cfg);
  CHECK(report_to_json(r) == report_to_json(again));
}

TEST_CASE("ablation rejects plain gcn and covers every variant") {
  Dataset ds = testutil::small_synth();
  PipelineConfig cfg;
  shrink(cfg);
  cfg.arch = Arch::gcn;
  CHECK_THROWS_AS(run_ablation(ds, cfg, Variant::full), ConfigError);

  cfg.arch = Arch::de2gnn;
  EvalReport r = run_ablation(ds, cfg, Variant::no_homo);
  CHECK(r.variant == "no_homo");
  CHECK(r.overall_acc > 0.0);
}

TEST_CASE("sweep emits one point per value") {
  testutil::TmpDir dir("pipeline-sweep");
  Dataset ds = testutil::small_synth();
  PipelineConfig cfg;
  shrink(cfg);
  auto points = run_sweep(ds, cfg, "k", std::vector<int>{2, 4});
  REQUIRE(points.size() == 2);
  CHECK(points[0].parameter == "k");
  CHECK(points[0].value == 2);
  CHECK(points[1].value == 4);

  write_sweep_csv(points, dir.file("sweep.csv"));
  std::string text = testutil::slurp_file(dir.file("sweep.csv"));
  CHECK(text.substr(0, text.find('\n')) ==
        "parameter,value,overall_acc,tail_acc,std_overall,std_tail");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  CHECK_THROWS_AS(run_sweep(ds, cfg, "t1", std::vector<int>{1}), ConfigError);
}

}  // TEST_SUITE
