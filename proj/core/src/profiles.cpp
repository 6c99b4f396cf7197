#include "gazeload/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"
#include "gazeload/rng.hpp"

namespace gazeload {

using nlohmann::json;

const std::array<std::string, kTraitCount>& trait_names() {
  static const std::array<std::string, kTraitCount> names = {
      "blink_intensity", "pupil_sensitivity", "pupil_baseline", "gaze_instability"};
  return names;
}

void TraitAccumulator::add(const FeatureSeries& raw_seconds, const GazeRecording& rec) {
  for (const auto& s : raw_seconds.seconds) {
    blink_sum_ += s.values[kBlinkCount];
    ++n_seconds_;
  }
  for (const auto& sample : rec.samples) {
    if (!sample.valid) continue;
    ++n_valid_;
    pupil_sum_ += sample.pupil;
    pupil_sq_ += sample.pupil * sample.pupil;
    yaw_sum_ += sample.yaw_deg;
    yaw_sq_ += sample.yaw_deg * sample.yaw_deg;
    pitch_sum_ += sample.pitch_deg;
    pitch_sq_ += sample.pitch_deg * sample.pitch_deg;
  }
}

TraitVector TraitAccumulator::finish(const std::string& user_id) const {
  if (n_seconds_ < 30) {
    throw InputError("user " + user_id + " has " + std::to_string(n_seconds_) +
                     " seconds of data; at least 30 required for traits");
  }
  TraitVector t;
  t.user_id = user_id;
  t.values[kBlinkIntensity] = blink_sum_ / double(n_seconds_);
  if (n_valid_ > 0) {
    const double n = double(n_valid_);
    const double pupil_mean = pupil_sum_ / n;
    const double pupil_var = std::max(0.0, pupil_sq_ / n - pupil_mean * pupil_mean);
    const double yaw_mean = yaw_sum_ / n;
    const double yaw_var = std::max(0.0, yaw_sq_ / n - yaw_mean * yaw_mean);
    const double pitch_mean = pitch_sum_ / n;
    const double pitch_var = std::max(0.0, pitch_sq_ / n - pitch_mean * pitch_mean);
    t.values[kPupilSensitivity] = std::sqrt(pupil_var);
    t.values[kPupilBaseline] = pupil_mean;
    t.values[kGazeInstability] = std::sqrt(yaw_var + pitch_var);
  }
  return t;
}

TraitVector compute_user_traits(const std::string& user_id,
                                const FeatureSeries& raw_seconds,
                                const GazeRecording& rec) {
  TraitAccumulator acc;
  acc.add(raw_seconds, rec);
  return acc.finish(user_id);
}

namespace {

using Point = std::array<double, kTraitCount>;

double dist2(const Point& a, const Point& b) {
  double d = 0.0;
  for (int i = 0; i < kTraitCount; ++i) {
    const double diff = a[size_t(i)] - b[size_t(i)];
    d += diff * diff;
  }
  return d;
}

struct KMeansOut {
  std::vector<Point> centroids;
  std::vector<int> assignments;
};

KMeansOut kmeans(const std::vector<Point>& points, int k, Rng& rng) {
  const size_t n = points.size();
  KMeansOut out;
  out.centroids.reserve(size_t(k));

  // k-means++ seeding
  out.centroids.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  while (int(out.centroids.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : out.centroids) best = std::min(best, dist2(points[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      out.centroids.push_back(points[rng.below(n)]);
      continue;
    }
    double target = rng.uniform() * total;
    size_t pick = n - 1;
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= target) {
        pick = i;
        break;
      }
    }
    out.centroids.push_back(points[pick]);
  }

  out.assignments.assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = dist2(points[i], out.centroids[size_t(c)]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      out.assignments[i] = best_c;
    }
    std::vector<Point> sums(size_t(k), Point{});
    std::vector<int> counts(size_t(k), 0);
    for (size_t i = 0; i < n; ++i) {
      for (int t = 0; t < kTraitCount; ++t)
        sums[size_t(out.assignments[i])][size_t(t)] += points[i][size_t(t)];
      ++counts[size_t(out.assignments[i])];
    }
    // Re-seed an empty cluster with the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (counts[size_t(c)] > 0) continue;
      double worst = -1.0;
      size_t pick = 0;
      for (size_t i = 0; i < n; ++i) {
        const double d = dist2(points[i], out.centroids[size_t(out.assignments[i])]);
        if (d > worst) {
          worst = d;
          pick = i;
        }
      }
      sums[size_t(c)] = points[pick];
      counts[size_t(c)] = 1;
      const int old = out.assignments[pick];
      for (int t = 0; t < kTraitCount; ++t)
        sums[size_t(old)][size_t(t)] -= points[pick][size_t(t)];
      --counts[size_t(old)];
      out.assignments[pick] = c;
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      Point next{};
      for (int t = 0; t < kTraitCount; ++t)
        next[size_t(t)] = sums[size_t(c)][size_t(t)] / double(counts[size_t(c)]);
      shift = std::max(shift, std::sqrt(dist2(next, out.centroids[size_t(c)])));
      out.centroids[size_t(c)] = next;
    }
    if (shift < 1e-6) break;
  }
  // Final assignment against the converged centroids.
  for (size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::max();
    int best_c = 0;
    for (int c = 0; c < k; ++c) {
      const double d = dist2(points[i], out.centroids[size_t(c)]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    out.assignments[i] = best_c;
  }
  return out;
}

double mean_silhouette(const std::vector<Point>& points,
                       const std::vector<int>& assignments, int k) {
  const size_t n = points.size();
  std::vector<int> counts(size_t(k), 0);
  for (int a : assignments) ++counts[size_t(a)];
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const int own = assignments[i];
    if (counts[size_t(own)] <= 1) continue;  // silhouette 0 by convention
    std::vector<double> mean_dist(size_t(k), 0.0);
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[size_t(assignments[j])] += std::sqrt(dist2(points[i], points[j]));
    }
    const double a = mean_dist[size_t(own)] / double(counts[size_t(own)] - 1);
    double b = std::numeric_limits<double>::max();
    for (int c = 0; c < k; ++c) {
      if (c == own || counts[size_t(c)] == 0) continue;
      b = std::min(b, mean_dist[size_t(c)] / double(counts[size_t(c)]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / double(n);
}

std::vector<std::string> name_clusters(const ProfileModel& model) {
  const int k = model.k;
  std::vector<std::string> names(static_cast<size_t>(k));
  if (k != 3) {
    for (int c = 0; c < k; ++c) names[size_t(c)] = "Cluster-" + std::to_string(c);
    return names;
  }
  // Heuristic works in original trait units.
  std::vector<Point> raw(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) {
    for (int t = 0; t < kTraitCount; ++t) {
      raw[size_t(c)][size_t(t)] =
          model.centroids[size_t(c)][size_t(t)] * model.trait_std[size_t(t)] +
          model.trait_mean[size_t(t)];
    }
  }
  int restless = 0;
  for (int c = 1; c < k; ++c) {
    if (raw[size_t(c)][kBlinkIntensity] > raw[size_t(restless)][kBlinkIntensity])
      restless = c;
  }
  std::vector<int> rest;
  for (int c = 0; c < k; ++c) {
    if (c != restless) rest.push_back(c);
  }
  const int high = raw[size_t(rest[0])][kPupilBaseline] >=
                           raw[size_t(rest[1])][kPupilBaseline]
                       ? rest[0]
                       : rest[1];
  const int low = high == rest[0] ? rest[1] : rest[0];
  names[size_t(restless)] = "Restless";
  names[size_t(high)] = "High-Reactor";
  names[size_t(low)] = "Low-Reactor";
  return names;
}

}  // namespace

FitResult fit_profiles(const std::vector<TraitVector>& traits,
                       const std::vector<int>& k_range, std::uint64_t seed) {
  if (k_range.empty()) throw InputError("empty k range");
  int k_max = 0;
  for (int k : k_range) {
    if (k < 2) throw InputError("profile fit needs k >= 2");
    k_max = std::max(k_max, k);
  }
  if (int(traits.size()) < k_max + 1) {
    throw InputError("profile fit needs at least " + std::to_string(k_max + 1) +
                     " users, got " + std::to_string(traits.size()));
  }

  FitResult result;
  result.model.seed = seed;
  const size_t n = traits.size();
  for (int t = 0; t < kTraitCount; ++t) {
    double sum = 0.0;
    for (const auto& tv : traits) sum += tv.values[size_t(t)];
    const double mean = sum / double(n);
    double sq = 0.0;
    for (const auto& tv : traits) {
      const double d = tv.values[size_t(t)] - mean;
      sq += d * d;
    }
    double sd = std::sqrt(sq / double(n));
    if (sd < 1e-12) {
      result.warnings.push_back("trait " + trait_names()[size_t(t)] +
                                " has degenerate spread; excluded from standardization");
      sd = 0.0;
    }
    result.model.trait_mean[size_t(t)] = mean;
    result.model.trait_std[size_t(t)] = sd;
  }

  std::vector<Point> points(n);
  for (size_t i = 0; i < n; ++i) {
    for (int t = 0; t < kTraitCount; ++t) {
      const double sd = result.model.trait_std[size_t(t)];
      points[i][size_t(t)] =
          sd == 0.0
              ? 0.0
              : (traits[i].values[size_t(t)] - result.model.trait_mean[size_t(t)]) / sd;
    }
  }

  int best_k = 0;
  double best_sil = -std::numeric_limits<double>::max();
  KMeansOut best_run;
  for (int k : k_range) {
    Rng rng(mix_seed(seed, std::uint64_t(k)));
    KMeansOut run = kmeans(points, k, rng);
    const double sil = mean_silhouette(points, run.assignments, k);
    result.k_range.push_back(k);
    result.silhouette_by_k.push_back(sil);
    if (sil > best_sil || (sil == best_sil && k < best_k)) {
      best_sil = sil;
      best_k = k;
      best_run = std::move(run);
    }
  }

  result.model.k = best_k;
  result.model.centroids = std::move(best_run.centroids);
  result.model.names = name_clusters(result.model);
  result.assignments = std::move(best_run.assignments);
  result.selected_silhouette = best_sil;
  return result;
}

ProfileAssignment assign_profile(const ProfileModel& model, const TraitVector& traits) {
  if (model.k <= 0 || model.centroids.empty()) {
    throw InputError("profile model is empty");
  }
  Point p{};
  for (int t = 0; t < kTraitCount; ++t) {
    const double sd = model.trait_std[size_t(t)];
    p[size_t(t)] =
        sd == 0.0 ? 0.0 : (traits.values[size_t(t)] - model.trait_mean[size_t(t)]) / sd;
  }
  ProfileAssignment out;
  double best = std::numeric_limits<double>::max();
  for (int c = 0; c < model.k; ++c) {
    const double d = dist2(p, model.centroids[size_t(c)]);
    if (d < best) {
      best = d;
      out.cluster = c;
    }
  }
  out.name = model.names[size_t(out.cluster)];
  return out;
}

Baselines personal_baselines(const std::vector<FeatureVector>& calibration_seconds,
                             const std::vector<Level>* levels) {
  if (calibration_seconds.empty()) {
    throw InputError("no calibration seconds for personal baselines");
  }
  Baselines b;
  double pupil_sum = 0.0;
  int pupil_n = 0;
  double blink_sum = 0.0;
  for (const auto& s : calibration_seconds) {
    blink_sum += s.values[kBlinkCount];
    if (!(s.flags & kFlagNoPupil)) {
      pupil_sum += s.values[kAvgPupilSize];
      ++pupil_n;
    }
  }
  b.blink_mean = blink_sum / double(calibration_seconds.size());
  b.pupil_mean = pupil_n > 0 ? pupil_sum / pupil_n : 0.0;
  if (levels != nullptr) {
    std::array<bool, 3> seen{};
    for (Level l : *levels) seen[size_t(int(l))] = true;
    const int distinct = int(seen[0]) + int(seen[1]) + int(seen[2]);
    if (distinct < 2) {
      b.warnings.push_back("calibration covers a single difficulty level");
    }
  }
  return b;
}

std::string profile_model_to_json(const ProfileModel& model) {
  json j;
  j["k"] = model.k;
  j["trait_mean"] = model.trait_mean;
  j["trait_std"] = model.trait_std;
  j["centroids"] = model.centroids;
  j["names"] = model.names;
  j["seed"] = model.seed;
  return j.dump() + "\n";
}

ProfileModel profile_model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad profile model: ") + e.what());
  }
  ProfileModel m;
  m.k = j.at("k").get<int>();
  m.trait_mean = j.at("trait_mean").get<std::array<double, kTraitCount>>();
  m.trait_std = j.at("trait_std").get<std::array<double, kTraitCount>>();
  m.centroids = j.at("centroids").get<std::vector<std::array<double, kTraitCount>>>();
  m.names = j.at("names").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  if (int(m.centroids.size()) != m.k || int(m.names.size()) != m.k) {
    throw ParseError("profile model centroid/name count does not match k");
  }
  return m;
}

std::string profiles_to_jsonl(const std::vector<UserProfile>& profiles) {
  std::string out;
  for (const auto& p : profiles) {
    json j;
    j["user"] = p.user_id;
    j["cluster"] = p.cluster;
    j["profile"] = p.profile_name;
    j["traits"] = p.traits.values;
    j["baseline_pupil_mean"] = p.baselines.pupil_mean;
    j["baseline_blink_mean"] = p.baselines.blink_mean;
    if (!p.baselines.warnings.empty()) j["warnings"] = p.baselines.warnings;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<UserProfile> profiles_from_jsonl(const std::string& text) {
  std::vector<UserProfile> out;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad profile record: ") + e.what());
    }
    UserProfile p;
    p.user_id = j.at("user").get<std::string>();
    p.cluster = j.at("cluster").get<int>();
    p.profile_name = j.at("profile").get<std::string>();
    p.traits.user_id = p.user_id;
    p.traits.values = j.at("traits").get<std::array<double, kTraitCount>>();
    p.baselines.pupil_mean = j.at("baseline_pupil_mean").get<double>();
    p.baselines.blink_mean = j.at("baseline_blink_mean").get<double>();
    if (j.contains("warnings")) {
      for (const auto& w : j["warnings"]) p.baselines.warnings.push_back(w.get<std::string>());
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace gazeload
