#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gazeload/types.hpp"

namespace gazeload {

inline constexpr int kTraitCount = 4;

enum Trait : int {
  kBlinkIntensity = 0,   // mean blinks per second
  kPupilSensitivity = 1, // stddev of pupil over valid samples
  kPupilBaseline = 2,    // mean pupil over valid samples
  kGazeInstability = 3,  // sqrt(var(yaw) + var(pitch)) over valid samples
};

const std::array<std::string, kTraitCount>& trait_names();

struct TraitVector {
  std::string user_id;
  std::array<double, kTraitCount> values{};
};

// Streams one user's data (raw per-second features plus the raw samples they
// came from, across any number of recordings) into a trait vector.
// finish() requires at least 30 seconds of accumulated data.
class TraitAccumulator {
public:
  void add(const FeatureSeries& raw_seconds, const GazeRecording& rec);
  TraitVector finish(const std::string& user_id) const;
  std::int64_t seconds() const { return n_seconds_; }

private:
  std::int64_t n_seconds_ = 0;
  double blink_sum_ = 0.0;
  std::int64_t n_valid_ = 0;
  double pupil_sum_ = 0.0, pupil_sq_ = 0.0;
  double yaw_sum_ = 0.0, yaw_sq_ = 0.0;
  double pitch_sum_ = 0.0, pitch_sq_ = 0.0;
};

TraitVector compute_user_traits(const std::string& user_id,
                                const FeatureSeries& raw_seconds,
                                const GazeRecording& rec);

struct ProfileModel {
  int k = 0;
  std::array<double, kTraitCount> trait_mean{};
  std::array<double, kTraitCount> trait_std{};  // 0 marks a degenerate trait
  std::vector<std::array<double, kTraitCount>> centroids;  // standardized space
  std::vector<std::string> names;  // per centroid
  std::uint64_t seed = 0;
};

struct FitResult {
  ProfileModel model;
  std::vector<int> assignments;       // cluster per input trait vector
  std::vector<int> k_range;
  std::vector<double> silhouette_by_k;
  double selected_silhouette = 0.0;
  std::vector<std::string> warnings;
};

// Standardizes traits, clusters with k-means (k-means++ seeding, Lloyd until
// max centroid shift < 1e-6 or 100 iterations) for each k, and keeps the k
// with the highest mean silhouette (ties prefer the smaller k). For k = 3 the
// clusters are named by the trait heuristic: highest blink intensity is
// Restless; of the rest the larger pupil baseline is High-Reactor and the
// remainder Low-Reactor. Other k get Cluster-i names. Same seed, same input:
// bit-identical model.
FitResult fit_profiles(const std::vector<TraitVector>& traits,
                       const std::vector<int>& k_range, std::uint64_t seed = 42);

struct ProfileAssignment {
  int cluster = -1;
  std::string name;
};

// Nearest centroid in standardized trait space; exact ties resolve to the
// lower cluster index.
ProfileAssignment assign_profile(const ProfileModel& model, const TraitVector& traits);

struct Baselines {
  double pupil_mean = 0.0;
  double blink_mean = 0.0;
  std::vector<std::string> warnings;
};

// Personal calibration baselines from raw (unnormalized) per-second features
// of the calibration task. Seconds with no pupil data are excluded from the
// pupil mean. If labels are supplied and cover fewer than two distinct
// levels, a warning is recorded.
Baselines personal_baselines(const std::vector<FeatureVector>& calibration_seconds,
                             const std::vector<Level>* levels = nullptr);

struct UserProfile {
  std::string user_id;
  int cluster = -1;
  std::string profile_name;
  TraitVector traits;
  Baselines baselines;
};

std::string profile_model_to_json(const ProfileModel& model);
ProfileModel profile_model_from_json(const std::string& text);

std::string profiles_to_jsonl(const std::vector<UserProfile>& profiles);
std::vector<UserProfile> profiles_from_jsonl(const std::string& text);

}  // namespace gazeload
