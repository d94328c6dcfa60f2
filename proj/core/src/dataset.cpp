#include "de2gnn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "de2gnn/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace de2gnn {

namespace {

bool g_quiet = false;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits into lines without copying; keeps 1-based line numbers for errors.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t start = 0;
  long line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (end == text.size() && line.empty()) break;
    fn(line, line_no);
    start = end + 1;
  }
}

bool parse_int(std::string_view sv, long& out) {
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  return ec == std::errc{} && p == sv.data() + sv.size();
}

bool parse_double(std::string_view sv, double& out) {
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  return ec == std::errc{} && p == sv.data() + sv.size();
}

std::string loc(const std::string& path, long line) {
  return path + ":" + std::to_string(line);
}

}  // namespace

void set_quiet(bool quiet_flag) { g_quiet = quiet_flag; }
bool quiet() { return g_quiet; }

void warn(const std::string& msg) {
  if (!g_quiet) std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

std::vector<EdgePair> read_edge_file(const std::string& path, NodeId num_nodes) {
  const std::string text = read_text_file(path);
  std::vector<EdgePair> edges;
  long dropped_loops = 0;
  for_each_line(text, [&](std::string_view line, long line_no) {
    if (line.empty() || line.front() == '#') return;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw DataError("malformed edge line (expected two tab-separated ids) at " +
                      loc(path, line_no));
    long u = 0, v = 0;
    if (!parse_int(line.substr(0, tab), u) || !parse_int(line.substr(tab + 1), v))
      throw DataError("malformed edge line (expected two tab-separated ids) at " +
                      loc(path, line_no));
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      throw DataError("node id out of range at " + loc(path, line_no));
    if (u == v) {
      ++dropped_loops;
      return;
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  });
  if (dropped_loops > 0)
    warn(path + ": dropped " + std::to_string(dropped_loops) + " self-loop line(s)");
  return edges;
}

void write_edge_file(const std::vector<EdgePair>& edges, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& [u, v] : edges) out << u << '\t' << v << '\n';
}

namespace {

DenseMatrix read_feature_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<double> values;
  int dim = -1;
  int rows = 0;
  for_each_line(text, [&](std::string_view line, long line_no) {
    if (line.empty()) return;
    int count = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      double v = 0.0;
      if (!parse_double(line.substr(pos, end - pos), v))
        throw DataError("malformed feature value at " + loc(path, line_no));
      values.push_back(v);
      ++count;
      pos = end;
    }
    if (count == 0) return;
    if (dim < 0) dim = count;
    if (count != dim)
      throw DataError("feature dimension mismatch at " + loc(path, line_no) + ": expected " +
                      std::to_string(dim) + " values, got " + std::to_string(count));
    ++rows;
  });
  if (rows == 0) throw DataError("feature file is empty: " + path);
  DenseMatrix m(rows, dim);
  m.data = std::move(values);
  return m;
}

std::vector<int> read_label_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<int> labels;
  for_each_line(text, [&](std::string_view line, long line_no) {
    if (line.empty()) return;
    long v = 0;
    if (!parse_int(line, v)) throw DataError("malformed label at " + loc(path, line_no));
    if (v < 0) throw DataError("label out of range (negative) at " + loc(path, line_no));
    labels.push_back(static_cast<int>(v));
  });
  return labels;
}

std::vector<NodeId> read_split_array(const json& j, const std::string& key, NodeId n,
                                     const std::string& path) {
  if (!j.contains(key)) throw DataError(path + ": splits missing array '" + key + "'");
  std::vector<NodeId> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer()) throw DataError(path + ": split '" + key + "' has a non-integer id");
    const long id = v.get<long>();
    if (id < 0 || id >= n)
      throw DataError(path + ": split '" + key + "' node id out of range: " + std::to_string(id));
    out.push_back(static_cast<NodeId>(id));
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw DataError(path + ": split '" + key + "' contains duplicate ids");
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw DataError("cannot parse manifest " + manifest_path + ": " + e.what());
  }
  for (const char* key : {"edges", "features", "labels", "splits", "feature_kind"})
    if (!manifest.contains(key))
      throw DataError(manifest_path + ": manifest missing field '" + std::string(key) + "'");

  const fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& rel) { return (base / rel).string(); };

  Dataset ds;
  ds.name = manifest.value("name", fs::path(manifest_path).parent_path().filename().string());

  const std::string kind_str = manifest.at("feature_kind").get<std::string>();
  if (kind_str == "discrete")
    ds.features.kind = FeatureKind::discrete;
  else if (kind_str == "continuous")
    ds.features.kind = FeatureKind::continuous;
  else
    throw DataError(manifest_path + ": feature_kind must be 'discrete' or 'continuous', got '" +
                    kind_str + "'");

  ds.features.values = read_feature_file(resolve(manifest.at("features").get<std::string>()));
  const NodeId n = static_cast<NodeId>(ds.features.num_nodes());

  if (ds.features.kind == FeatureKind::discrete) {
    for (int i = 0; i < ds.features.num_nodes(); ++i) {
      const double* row = ds.features.values.row(i);
      double row_sum = 0.0;
      for (int j = 0; j < ds.features.dim(); ++j) {
        if (row[j] != 0.0 && row[j] != 1.0)
          throw DataError("discrete feature entry not in {0,1} at node " + std::to_string(i));
        row_sum += row[j];
      }
      if (row_sum == 0.0)
        throw DataError("all-zero discrete feature row at node " + std::to_string(i));
    }
  } else {
    if (!all_finite(ds.features.values))
      throw DataError("non-finite feature value in " + manifest.at("features").get<std::string>());
  }

  const std::string label_path = resolve(manifest.at("labels").get<std::string>());
  ds.labels.labels = read_label_file(label_path);
  if (static_cast<NodeId>(ds.labels.labels.size()) != n)
    throw DataError(label_path + ": label count " + std::to_string(ds.labels.labels.size()) +
                    " does not match node count " + std::to_string(n));
  ds.labels.num_classes = 1 + *std::max_element(ds.labels.labels.begin(), ds.labels.labels.end());

  const std::string edge_path = resolve(manifest.at("edges").get<std::string>());
  ds.graph = Graph::from_edges(n, read_edge_file(edge_path, n));

  const std::string split_path = resolve(manifest.at("splits").get<std::string>());
  json splits_json;
  try {
    splits_json = json::parse(read_text_file(split_path));
  } catch (const json::exception& e) {
    throw DataError("cannot parse splits " + split_path + ": " + e.what());
  }
  ds.splits.train = read_split_array(splits_json, "train", n, split_path);
  ds.splits.val = read_split_array(splits_json, "val", n, split_path);
  ds.splits.test = read_split_array(splits_json, "test", n, split_path);

  std::vector<NodeId> all;
  all.reserve(ds.splits.train.size() + ds.splits.val.size() + ds.splits.test.size());
  all.insert(all.end(), ds.splits.train.begin(), ds.splits.train.end());
  all.insert(all.end(), ds.splits.val.begin(), ds.splits.val.end());
  all.insert(all.end(), ds.splits.test.begin(), ds.splits.test.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw DataError(split_path + ": train/val/test splits overlap");

  if (ds.splits.train.empty()) throw DataError(split_path + ": training split is empty");
  std::vector<char> class_seen(static_cast<std::size_t>(ds.labels.num_classes), 0);
  for (NodeId v : ds.splits.train) class_seen[static_cast<std::size_t>(ds.labels.labels[v])] = 1;
  for (int c = 0; c < ds.labels.num_classes; ++c)
    if (!class_seen[static_cast<std::size_t>(c)])
      throw DataError(split_path + ": class " + std::to_string(c) +
                      " does not appear in the training split");

  if (!ds.graph.is_connected()) warn(ds.name + ": graph is not connected");
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);

  write_edge_file(ds.graph.edge_list(), (base / "edges.tsv").string());

  {
    std::ofstream out(base / "features.tsv", std::ios::binary);
    if (!out) throw DataError("cannot write features.tsv in " + dir);
    char buf[64];
    for (int i = 0; i < ds.features.num_nodes(); ++i) {
      const double* row = ds.features.values.row(i);
      for (int j = 0; j < ds.features.dim(); ++j) {
        if (j) out << ' ';
        // integral values (the common case for bag-of-words) print exactly
        if (row[j] == static_cast<long long>(row[j])) {
          out << static_cast<long long>(row[j]);
        } else {
          std::snprintf(buf, sizeof buf, "%.17g", row[j]);
          out << buf;
        }
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(base / "labels.tsv", std::ios::binary);
    if (!out) throw DataError("cannot write labels.tsv in " + dir);
    for (int y : ds.labels.labels) out << y << '\n';
  }

  {
    json j;
    j["train"] = ds.splits.train;
    j["val"] = ds.splits.val;
    j["test"] = ds.splits.test;
    std::ofstream out(base / "splits.json", std::ios::binary);
    if (!out) throw DataError("cannot write splits.json in " + dir);
    out << j.dump(2) << '\n';
  }

  {
    json j;
    j["name"] = ds.name;
    j["edges"] = "edges.tsv";
    j["features"] = "features.tsv";
    j["labels"] = "labels.tsv";
    j["splits"] = "splits.json";
    j["feature_kind"] = ds.features.kind == FeatureKind::discrete ? "discrete" : "continuous";
    std::ofstream out(base / "dataset.json", std::ios::binary);
    if (!out) throw DataError("cannot write dataset.json in " + dir);
    out << j.dump(2) << '\n';
  }
}

}  // namespace de2gnn
