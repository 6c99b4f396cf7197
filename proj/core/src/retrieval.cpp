#include "gazeload/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

using nlohmann::json;

std::vector<double> descriptor(const FeatureTable& table) {
  const int T = table.window;
  std::vector<double> d;
  d.reserve(size_t(kFeatureCount) * 3);
  const double tbar = double(T - 1) / 2.0;
  double tvar = 0.0;
  for (int t = 0; t < T; ++t) tvar += (t - tbar) * (t - tbar);
  for (int k = 0; k < kFeatureCount; ++k) {
    double sum = 0.0;
    for (int t = 0; t < T; ++t) sum += table.cell(k, t);
    const double mean = sum / T;
    double sq = 0.0, cov = 0.0;
    for (int t = 0; t < T; ++t) {
      const double dv = table.cell(k, t) - mean;
      sq += dv * dv;
      cov += (t - tbar) * dv;
    }
    d.push_back(mean);
    d.push_back(std::sqrt(sq / T));
    d.push_back(tvar > 0.0 ? cov / tvar : 0.0);
  }
  return d;
}

double descriptor_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw InputError("descriptor length mismatch: " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double flattened_cosine_distance(const FeatureTable& a, const FeatureTable& b) {
  if (a.cells.size() != b.cells.size()) {
    throw InputError("table size mismatch for cosine similarity");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.cells.size(); ++i) {
    dot += a.cells[i] * b.cells[i];
    na += a.cells[i] * a.cells[i];
    nb += b.cells[i] * b.cells[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

RetrievalDb RetrievalDb::build(std::vector<RetrievalRecord> records,
                               const std::optional<std::set<std::string>>& train_users) {
  RetrievalDb db;
  for (const auto& r : records) {
    if (r.user_id.empty() || r.profile.empty()) {
      throw InputError("retrieval record missing user/profile tag (window " +
                       std::to_string(r.window_id) + ")");
    }
    if (r.descriptor.size() != size_t(kFeatureCount) * 3) {
      throw InputError("retrieval record has malformed descriptor");
    }
    if (train_users && !train_users->count(r.user_id)) {
      throw InputError("record for user " + r.user_id +
                       " is outside the training split");
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const RetrievalRecord& a, const RetrievalRecord& b) {
                     if (a.user_id != b.user_id) return a.user_id < b.user_id;
                     if (a.task != b.task) return int(a.task) < int(b.task);
                     return a.window_id < b.window_id;
                   });
  db.records_ = std::move(records);
  db.window_ = db.records_.empty() ? 0 : db.records_.front().table.window;
  return db;
}

std::vector<int> RetrievalDb::filter(TaskId task, const std::string& profile) const {
  std::vector<int> ids;
  for (size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].task != task) continue;
    if (!profile.empty() && records_[i].profile != profile) continue;
    ids.push_back(int(i));
  }
  return ids;
}

RetrievalResult retrieve(const RetrievalDb& db, const FeatureTable& query,
                         const std::string& profile, const RetrieveOptions& options) {
  RetrievalResult result;
  auto usable = [&](int id) {
    return !options.exclude_same_user || db.records()[size_t(id)].user_id != query.user_id;
  };

  std::vector<int> ids = db.filter(query.task, profile);
  ids.erase(std::remove_if(ids.begin(), ids.end(), [&](int id) { return !usable(id); }),
            ids.end());
  if (ids.empty()) {
    result.fallback_task_only = true;
    ids = db.filter(query.task, "");
    ids.erase(std::remove_if(ids.begin(), ids.end(), [&](int id) { return !usable(id); }),
              ids.end());
  }
  if (ids.empty()) return result;

  const std::vector<double> q = descriptor(query);
  std::vector<RetrievalHit> hits;
  hits.reserve(ids.size());
  for (int id : ids) {
    const auto& rec = db.records()[size_t(id)];
    RetrievalHit hit;
    hit.record_id = id;
    hit.distance = options.flattened_cosine
                       ? flattened_cosine_distance(query, rec.table)
                       : descriptor_distance(q, rec.descriptor);
    hits.push_back(hit);
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const RetrievalHit& a, const RetrievalHit& b) {
                     if (a.distance != b.distance) return a.distance < b.distance;
                     return a.record_id < b.record_id;
                   });
  if (int(hits.size()) > options.k) hits.resize(size_t(std::max(options.k, 0)));
  result.hits = std::move(hits);
  return result;
}

std::string db_to_jsonl(const RetrievalDb& db) {
  json header = {{"format", "gazeload-db"},
                 {"version", 1},
                 {"features", kFeatureCount},
                 {"window", db.window()}};
  std::string out = header.dump() + "\n";
  for (const auto& r : db.records()) {
    json j;
    j["user"] = r.user_id;
    j["task"] = to_string(r.task);
    j["window_id"] = r.window_id;
    j["profile"] = r.profile;
    j["label"] = to_string(r.label);
    j["descriptor"] = r.descriptor;
    j["cells"] = r.table.cells;
    j["end_second"] = r.table.end_second;
    bool any_missing = false;
    for (auto m : r.table.column_missing) any_missing |= (m != 0);
    if (any_missing) j["missing"] = r.table.column_missing;
    out += j.dump() + "\n";
  }
  return out;
}

RetrievalDb db_from_jsonl(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty retrieval database file");
  json header;
  try {
    header = json::parse(lines[0]);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad database header: ") + e.what());
  }
  if (header.value("format", "") != "gazeload-db") {
    throw ParseError("not a retrieval database file");
  }
  if (header.value("version", 0) != 1) {
    throw ParseError("unsupported database version " +
                     std::to_string(header.value("version", 0)));
  }
  if (header.value("features", 0) != kFeatureCount) {
    throw ParseError("database feature count mismatch");
  }
  const int window = header.value("window", 0);

  std::vector<RetrievalRecord> records;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError("bad database record at line " + std::to_string(i + 1) + ": " +
                       e.what());
    }
    RetrievalRecord r;
    r.user_id = j.at("user").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.window_id = j.at("window_id").get<int>();
    r.profile = j.at("profile").get<std::string>();
    r.label = parse_level(j.at("label").get<std::string>());
    r.descriptor = j.at("descriptor").get<std::vector<double>>();
    r.table.user_id = r.user_id;
    r.table.task = r.task;
    r.table.end_second = j.at("end_second").get<int>();
    r.table.window = window;
    r.table.cells = j.at("cells").get<std::vector<double>>();
    if (r.table.cells.size() != size_t(kFeatureCount) * size_t(window)) {
      throw ParseError("bad cell payload at line " + std::to_string(i + 1));
    }
    if (j.contains("missing")) {
      r.table.column_missing = j["missing"].get<std::vector<std::uint8_t>>();
    } else {
      r.table.column_missing.assign(size_t(window), 0);
    }
    records.push_back(std::move(r));
  }
  return RetrievalDb::build(std::move(records));
}

}  // namespace gazeload
