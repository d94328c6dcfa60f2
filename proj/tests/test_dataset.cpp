#include <fstream>

#include <doctest.h>

#include "de2gnn/dataset.hpp"
#include "de2gnn/errors.hpp"
#include "helpers.hpp"

using namespace de2gnn;
using testutil::TmpDir;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("round trip through the on-disk layout") {
  TmpDir dir("dataset-rt");
  Dataset ds = testutil::tiny_dataset();
  write_dataset(ds, dir.str());
  Dataset back = load_dataset(dir.file("dataset.json"));
  CHECK(back.graph.edge_list() == ds.graph.edge_list());
  CHECK(back.labels.labels == ds.labels.labels);
  CHECK(back.labels.num_classes == 2);
  CHECK(back.splits.train == ds.splits.train);
  CHECK(back.splits.val == ds.splits.val);
  CHECK(back.splits.test == ds.splits.test);
  REQUIRE(back.features.values.same_shape(ds.features.values));
  for (std::size_t i = 0; i < ds.features.values.size(); ++i)
    CHECK(back.features.values.data[i] == ds.features.values.data[i]);
  CHECK(back.features.kind == FeatureKind::discrete);
}

TEST_CASE("edge file parsing") {
  TmpDir dir("dataset-edges");
  set_quiet(true);
  write_file(dir.file("e.tsv"), "# comment\n0\t1\n\n2\t1\n3\t3\n");
  auto edges = read_edge_file(dir.file("e.tsv"), 4);
  set_quiet(false);
  // the self-loop line is dropped, the rest parse in file order
  CHECK(edges == std::vector<EdgePair>{{0, 1}, {2, 1}});

  write_file(dir.file("bad.tsv"), "0\t1\noops\n");
  CHECK_THROWS_WITH_AS(read_edge_file(dir.file("bad.tsv"), 4),
                       doctest::Contains("bad.tsv:2"), DataError);

  write_file(dir.file("range.tsv"), "0\t9\n");
  CHECK_THROWS_AS(read_edge_file(dir.file("range.tsv"), 4), DataError);
}

TEST_CASE("loader rejects malformed data") {
  TmpDir dir("dataset-bad");
  Dataset ds = testutil::tiny_dataset();
  write_dataset(ds, dir.str());
  std::string manifest = dir.file("dataset.json");

  SUBCASE("non-binary discrete feature") {
    write_file(dir.file("features.tsv"),
               "2 1 0 0 0 0\n1 0 1 0 0 0\n0 1 1 0 0 0\n1 1 0 1 0 0\n"
               "0 0 0 1 1 0\n0 0 0 1 0 1\n0 0 0 0 1 1\n0 0 0 1 1 1\n");
    CHECK_THROWS_WITH_AS(load_dataset(manifest), doctest::Contains("{0,1}"), DataError);
  }
  SUBCASE("all-zero discrete row") {
    write_file(dir.file("features.tsv"),
               "0 0 0 0 0 0\n1 0 1 0 0 0\n0 1 1 0 0 0\n1 1 0 1 0 0\n"
               "0 0 0 1 1 0\n0 0 0 1 0 1\n0 0 0 0 1 1\n0 0 0 1 1 1\n");
    CHECK_THROWS_WITH_AS(load_dataset(manifest), doctest::Contains("all-zero"), DataError);
  }
  SUBCASE("label count mismatch") {
    write_file(dir.file("labels.tsv"), "0\n0\n1\n");
    CHECK_THROWS_AS(load_dataset(manifest), DataError);
  }
  SUBCASE("overlapping splits") {
    write_file(dir.file("splits.json"),
               R"({"train":[0,1,4,5],"val":[0,2,6],"test":[3,7]})");
    CHECK_THROWS_WITH_AS(load_dataset(manifest), doctest::Contains("overlap"), DataError);
  }
  SUBCASE("class missing from train") {
    write_file(dir.file("splits.json"),
               R"({"train":[0,1],"val":[2,6],"test":[3,7]})");
    CHECK_THROWS_AS(load_dataset(manifest), DataError);
  }
  SUBCASE("manifest missing a field") {
    write_file(manifest, R"({"edges":"edges.tsv","features":"features.tsv"})");
    CHECK_THROWS_WITH_AS(load_dataset(manifest), doctest::Contains("missing field"), DataError);
  }
}

TEST_CASE("disconnection only warns") {
  TmpDir dir("dataset-disc");
  Dataset ds = testutil::tiny_dataset();
  ds.graph = ds.graph.with_edges_removed({{3, 4}});
  write_dataset(ds, dir.str());
  set_quiet(true);
  Dataset back = load_dataset(dir.file("dataset.json"));
  set_quiet(false);
  CHECK(back.graph.num_edges() == ds.graph.num_edges());
}

}  // TEST_SUITE
