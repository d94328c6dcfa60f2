#pragma once

// Shared fixtures for the unit tests: a throwaway directory and small
// hand-built datasets with fully known structure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>

#include "de2gnn/dataset.hpp"
#include "de2gnn/graph.hpp"
#include "de2gnn/synth.hpp"

namespace testutil {

class TmpDir {
 public:
  explicit TmpDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("de2gnn-" + tag + "-" + std::to_string(++counter));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TmpDir() { std::filesystem::remove_all(path_); }
  TmpDir(const TmpDir&) = delete;
  TmpDir& operator=(const TmpDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// 8 nodes, 2 classes, discrete features engineered so class blocks share
// words: nodes 0-3 use features {0,1,2}, nodes 4-7 use {3,4,5}, with one
// bridge node (3) that also carries a word from the other block.
inline de2gnn::Dataset tiny_dataset() {
  de2gnn::Dataset ds;
  ds.name = "tiny";
  ds.graph = de2gnn::Graph::from_edges(
      8, {{0, 1}, {1, 2}, {2, 3}, {0, 2}, {4, 5}, {5, 6}, {6, 7}, {4, 6}, {3, 4}});
  de2gnn::DenseMatrix x(8, 6);
  auto set = [&x](int node, std::initializer_list<int> words) {
    for (int w : words) x.at(node, w) = 1.0;
  };
  set(0, {0, 1});
  set(1, {0, 2});
  set(2, {1, 2});
  set(3, {0, 1, 3});
  set(4, {3, 4});
  set(5, {3, 5});
  set(6, {4, 5});
  set(7, {3, 4, 5});
  ds.features = {std::move(x), de2gnn::FeatureKind::discrete};
  ds.labels = {{0, 0, 0, 0, 1, 1, 1, 1}, 2};
  ds.splits.train = {0, 1, 4, 5};
  ds.splits.val = {2, 6};
  ds.splits.test = {3, 7};
  return ds;
}

// Small but trainable synthetic dataset for pipeline-level tests.
inline de2gnn::Dataset small_synth(int n = 160, std::uint64_t seed = 11) {
  de2gnn::SynthProfile p;
  p.name = "small";
  p.num_nodes = n;
  p.num_edges = n * 2;
  p.num_features = 96;
  p.num_classes = 4;
  p.mix_homophily = 0.9;
  p.behavior_flip = 0.05;
  p.own_topic_prob = 0.7;
  p.words_mean = 10.0;
  p.train_frac = 0.2;
  p.val_frac = 0.2;
  p.seed = seed;
  return de2gnn::make_synthetic_dataset(p);
}

inline std::string slurp_file(const std::string& path) {
  std::string text;
  FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
  std::fclose(f);
  return text;
}

}  // namespace testutil
