#include "de2gnn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "de2gnn/errors.hpp"

using json = nlohmann::ordered_json;

namespace de2gnn {

double accuracy(std::span<const int> pred, const LabelVector& labels,
                std::span<const NodeId> mask) {
  if (mask.empty()) throw DataError("accuracy: empty mask");
  std::int64_t correct = 0;
  for (NodeId v : mask) correct += pred[static_cast<std::size_t>(v)] == labels.labels[v];
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

std::vector<std::string> bucket_keys(int tail_bound) {
  std::vector<std::string> keys;
  for (int d = 1; d <= tail_bound; ++d) keys.push_back(std::to_string(d));
  keys.push_back("over");
  return keys;
}

DegreeBuckets degree_bucket_accuracy(std::span<const int> pred, const LabelVector& labels,
                                     std::span<const NodeId> mask,
                                     std::span<const int> degrees, int tail_bound) {
  if (tail_bound < 1) throw ConfigError("degree_bucket_accuracy: tail_bound must be >= 1");
  DegreeBuckets buckets;
  for (const auto& key : bucket_keys(tail_bound)) buckets[key];
  for (NodeId v : mask) {
    const int deg = degrees[static_cast<std::size_t>(v)];
    // degree-0 nodes land in bucket "1"; see degree_zero_folded in reports
    const std::string key =
        deg > tail_bound ? std::string("over") : std::to_string(std::max(deg, 1));
    DegreeBucket& b = buckets[key];
    ++b.count;
    b.correct += pred[static_cast<std::size_t>(v)] == labels.labels[v];
  }
  return buckets;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw DataError("mean_of: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double std_of(std::span<const double> xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

namespace {

// numeric buckets ascending, then "over"
std::vector<std::string> ordered_keys(const DegreeBuckets& buckets) {
  std::vector<std::string> keys;
  for (const auto& [key, b] : buckets)
    if (key != "over") keys.push_back(key);
  std::sort(keys.begin(), keys.end(),
            [](const std::string& a, const std::string& b) { return std::stoi(a) < std::stoi(b); });
  if (buckets.count("over")) keys.push_back("over");
  return keys;
}

json buckets_to_json(const DegreeBuckets& buckets) {
  json j = json::object();
  for (const auto& key : ordered_keys(buckets)) {
    const DegreeBucket& b = buckets.at(key);
    json e;
    e["count"] = b.count;
    e["correct"] = b.correct;
    if (b.has_acc())
      e["acc"] = b.acc();
    else
      e["acc"] = nullptr;
    j[key] = std::move(e);
  }
  return j;
}

DegreeBuckets buckets_from_json(const json& j, const std::string& path) {
  DegreeBuckets out;
  for (const auto& [key, e] : j.items()) {
    if (!e.contains("count") || !e.contains("correct"))
      throw DataError(path + ": per_degree bucket '" + key + "' missing field 'count'/'correct'");
    DegreeBucket b;
    b.count = e.at("count").get<long>();
    b.correct = e.at("correct").get<long>();
    out[key] = b;
  }
  return out;
}

const json& require(const json& j, const char* field, const std::string& path) {
  if (!j.contains(field))
    throw DataError(path + ": report missing field '" + std::string(field) + "'");
  return j.at(field);
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json j;
  j["schema"] = r.schema;
  j["dataset"] = r.dataset;
  j["arch"] = r.arch;
  j["variant"] = r.variant;
  j["attack"] = r.attack;
  j["attack_rate"] = r.attack_rate;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["tail_bound"] = r.tail_bound;
  j["tail_reference"] = r.tail_reference;
  j["degree_zero_folded"] = r.degree_zero_folded;
  j["overall_acc"] = r.overall_acc;
  j["tail_acc"] = r.tail_acc;
  j["per_degree"] = buckets_to_json(r.per_degree);
  if (r.attention_homo_mean_tail) {
    j["attention_homo_mean_tail"] = *r.attention_homo_mean_tail;
    j["attention_homo_std_tail"] = *r.attention_homo_std_tail;
  }
  if (r.repeats) {
    const RepeatStats& s = *r.repeats;
    json rep;
    rep["runs"] = s.runs;
    rep["overall_mean"] = s.overall_mean;
    rep["overall_std"] = s.overall_std;
    rep["tail_mean"] = s.tail_mean;
    rep["tail_std"] = s.tail_std;
    rep["per_degree_mean"] = s.per_degree_mean;
    rep["per_run_overall"] = s.per_run_overall;
    rep["per_run_tail"] = s.per_run_tail;
    j["repeats"] = std::move(rep);
  }
  if (!r.config_json.empty()) j["config"] = json::parse(r.config_json);
  return j.dump(2) + "\n";
}

void write_report(const EvalReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << report_to_json(r);
}

EvalReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw DataError("cannot parse report " + path + ": " + e.what());
  }

  EvalReport r;
  r.schema = require(j, "schema", path).get<std::string>();
  if (r.schema != "de2gnn-report-v1")
    throw DataError(path + ": unsupported report schema '" + r.schema + "'");
  r.dataset = require(j, "dataset", path).get<std::string>();
  r.arch = require(j, "arch", path).get<std::string>();
  r.variant = require(j, "variant", path).get<std::string>();
  r.attack = require(j, "attack", path).get<std::string>();
  r.attack_rate = require(j, "attack_rate", path).get<double>();
  r.seed = require(j, "seed", path).get<std::uint64_t>();
  r.config_hash = require(j, "config_hash", path).get<std::string>();
  r.tail_bound = require(j, "tail_bound", path).get<int>();
  r.tail_reference = require(j, "tail_reference", path).get<std::string>();
  r.degree_zero_folded = require(j, "degree_zero_folded", path).get<bool>();
  r.overall_acc = require(j, "overall_acc", path).get<double>();
  r.tail_acc = require(j, "tail_acc", path).get<double>();
  r.per_degree = buckets_from_json(require(j, "per_degree", path), path);
  if (j.contains("attention_homo_mean_tail")) {
    r.attention_homo_mean_tail = j.at("attention_homo_mean_tail").get<double>();
    r.attention_homo_std_tail = j.value("attention_homo_std_tail", 0.0);
  }
  if (j.contains("repeats")) {
    const json& rep = j.at("repeats");
    RepeatStats s;
    s.runs = require(rep, "runs", path).get<int>();
    s.overall_mean = require(rep, "overall_mean", path).get<double>();
    s.overall_std = require(rep, "overall_std", path).get<double>();
    s.tail_mean = require(rep, "tail_mean", path).get<double>();
    s.tail_std = require(rep, "tail_std", path).get<double>();
    if (rep.contains("per_degree_mean"))
      s.per_degree_mean = rep.at("per_degree_mean").get<std::map<std::string, double>>();
    if (rep.contains("per_run_overall"))
      s.per_run_overall = rep.at("per_run_overall").get<std::vector<double>>();
    if (rep.contains("per_run_tail"))
      s.per_run_tail = rep.at("per_run_tail").get<std::vector<double>>();
    r.repeats = std::move(s);
  }
  if (j.contains("config")) r.config_json = j.at("config").dump();
  return r;
}

void write_per_degree_csv(const DegreeBuckets& buckets, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "degree,acc,count\n";
  char buf[32];
  for (const auto& key : ordered_keys(buckets)) {
    const DegreeBucket& b = buckets.at(key);
    if (b.has_acc()) {
      std::snprintf(buf, sizeof buf, "%.6f", b.acc());
      out << key << ',' << buf << ',' << b.count << '\n';
    } else {
      out << key << ",," << b.count << '\n';
    }
  }
}

}  // namespace de2gnn
