#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gazeload/error.hpp"
#include "gazeload/profiles.hpp"

namespace {

using namespace gazeload;

FeatureSeries blink_series(int seconds) {
  FeatureSeries s;
  s.user_id = "u";
  for (int i = 0; i < seconds; ++i) {
    FeatureVector v;
    v.second = i;
    v.values[kBlinkCount] = double(i % 3);  // 0,1,2,... mean 1.0 over multiples of 3
    s.seconds.push_back(v);
  }
  return s;
}

GazeSample sample(double yaw, double pitch, double pupil, bool valid = true) {
  GazeSample s;
  s.yaw_deg = yaw;
  s.pitch_deg = pitch;
  s.pupil = pupil;
  s.valid = valid;
  return s;
}

// Three tight blobs at well-separated trait centroids, eight users each.
std::vector<TraitVector> three_blobs() {
  const std::array<std::array<double, kTraitCount>, 3> centers = {{
      {1.10, 95.31, 388.62, 8.50},   // High-Reactor-like
      {0.85, 43.86, 280.00, 6.88},   // Low-Reactor-like
      {2.04, 60.00, 198.87, 11.43},  // Restless-like
  }};
  std::vector<TraitVector> traits;
  for (int blob = 0; blob < 3; ++blob) {
    for (int j = 0; j < 8; ++j) {
      TraitVector t;
      t.user_id = "b" + std::to_string(blob) + "_" + std::to_string(j);
      for (int k = 0; k < kTraitCount; ++k) {
        t.values[std::size_t(k)] =
            centers[std::size_t(blob)][std::size_t(k)] * (1.0 + 0.001 * (j - 4));
      }
      traits.push_back(t);
    }
  }
  return traits;
}

}  // namespace

TEST_CASE("trait accumulation matches hand-computed statistics") {
  TraitAccumulator acc;
  GazeRecording rec;
  rec.samples.push_back(sample(0.0, 0.0, 10.0));
  rec.samples.push_back(sample(2.0, 0.0, 20.0));
  rec.samples.push_back(sample(100.0, 50.0, 9999.0, false));  // ignored
  acc.add(blink_series(30), rec);
  CHECK(acc.seconds() == 30);

  const TraitVector t = acc.finish("u07");
  CHECK(t.user_id == "u07");
  CHECK(t.values[kBlinkIntensity] == 1.0);
  CHECK(t.values[kPupilBaseline] == 15.0);
  CHECK(t.values[kPupilSensitivity] == 5.0);  // population stddev of {10, 20}
  CHECK(t.values[kGazeInstability] == 1.0);   // sqrt(var{0,2} + var{0,0})

  // Splitting the same data over two add() calls changes nothing.
  TraitAccumulator split;
  GazeRecording first, second;
  first.samples.push_back(rec.samples[0]);
  second.samples.push_back(rec.samples[1]);
  second.samples.push_back(rec.samples[2]);
  split.add(blink_series(15), first);
  FeatureSeries tail = blink_series(30);
  tail.seconds.erase(tail.seconds.begin(), tail.seconds.begin() + 15);
  split.add(tail, second);
  const TraitVector t2 = split.finish("u07");
  for (int k = 0; k < kTraitCount; ++k) {
    CHECK(t2.values[std::size_t(k)] ==
          doctest::Approx(t.values[std::size_t(k)]).epsilon(1e-12));
  }

  // One-shot helper agrees with the accumulator.
  const TraitVector t3 = compute_user_traits("u07", blink_series(30), rec);
  for (int k = 0; k < kTraitCount; ++k) {
    CHECK(t3.values[std::size_t(k)] == t.values[std::size_t(k)]);
  }

  TraitAccumulator thin;
  thin.add(blink_series(29), rec);
  CHECK_THROWS_WITH_AS(thin.finish("u09"), doctest::Contains("at least 30"),
                       InputError);
}

TEST_CASE("clustering three separated blobs recovers k=3 and the trait names") {
  const std::vector<TraitVector> traits = three_blobs();
  const std::vector<int> k_range = {2, 3, 4, 5};
  const FitResult fit = fit_profiles(traits, k_range, 42);

  CHECK(fit.model.k == 3);
  CHECK(fit.warnings.empty());
  REQUIRE(fit.k_range == k_range);
  REQUIRE(fit.silhouette_by_k.size() == 4);
  CHECK(fit.selected_silhouette == fit.silhouette_by_k[1]);
  for (double s : fit.silhouette_by_k) CHECK(fit.selected_silhouette >= s);
  CHECK(fit.selected_silhouette > 0.9);  // tight, well-separated blobs

  // Every blob lands in exactly one cluster and no two blobs share one.
  REQUIRE(fit.assignments.size() == traits.size());
  std::set<int> blob_cluster;
  for (int blob = 0; blob < 3; ++blob) {
    std::set<int> clusters;
    for (int j = 0; j < 8; ++j) clusters.insert(fit.assignments[std::size_t(blob * 8 + j)]);
    REQUIRE(clusters.size() == 1);
    blob_cluster.insert(*clusters.begin());
  }
  CHECK(blob_cluster.size() == 3);

  // Naming heuristic: highest blink intensity is Restless, then pupil
  // baseline splits High- from Low-Reactor.
  const auto name_of_blob = [&](int blob) {
    return fit.model.names[std::size_t(fit.assignments[std::size_t(blob * 8)])];
  };
  CHECK(name_of_blob(0) == "High-Reactor");
  CHECK(name_of_blob(1) == "Low-Reactor");
  CHECK(name_of_blob(2) == "Restless");

  // Bit-identical rerun.
  const FitResult again = fit_profiles(traits, k_range, 42);
  CHECK(again.model.centroids == fit.model.centroids);
  CHECK(again.assignments == fit.assignments);
  CHECK(again.model.names == fit.model.names);

  // Non-triple k keeps generic names.
  const FitResult k2 = fit_profiles(traits, {2}, 42);
  REQUIRE(k2.model.names.size() == 2);
  CHECK(k2.model.names[0] == "Cluster-0");
  CHECK(k2.model.names[1] == "Cluster-1");
}

TEST_CASE("fit rejects unusable inputs") {
  const std::vector<TraitVector> traits = three_blobs();
  CHECK_THROWS_AS(fit_profiles(traits, {}), InputError);
  CHECK_THROWS_AS(fit_profiles(traits, {1, 3}), InputError);
  std::vector<TraitVector> five(traits.begin(), traits.begin() + 5);
  CHECK_THROWS_WITH_AS(fit_profiles(five, {2, 3, 4, 5}),
                       doctest::Contains("at least 6"), InputError);

  // A constant trait is flagged and ignored rather than fatal.
  std::vector<TraitVector> flat = three_blobs();
  for (auto& t : flat) t.values[kGazeInstability] = 7.0;
  const FitResult fit = fit_profiles(flat, {2, 3}, 42);
  REQUIRE(fit.warnings.size() == 1);
  CHECK(fit.warnings[0].find("gaze_instability") != std::string::npos);
  CHECK(fit.model.trait_std[kGazeInstability] == 0.0);
}

TEST_CASE("assignment picks the nearest centroid, ties to the lower index") {
  ProfileModel model;
  model.k = 2;
  model.trait_mean = {0.0, 0.0, 0.0, 0.0};
  model.trait_std = {1.0, 1.0, 1.0, 1.0};
  model.centroids = {{0.0, 0.0, 0.0, 0.0}, {2.0, 2.0, 2.0, 2.0}};
  model.names = {"Cluster-0", "Cluster-1"};

  TraitVector q;
  q.values = {0.9, 0.9, 0.9, 0.9};
  CHECK(assign_profile(model, q).cluster == 0);
  q.values = {1.1, 1.1, 1.1, 1.1};
  const ProfileAssignment a = assign_profile(model, q);
  CHECK(a.cluster == 1);
  CHECK(a.name == "Cluster-1");
  q.values = {1.0, 1.0, 1.0, 1.0};  // equidistant
  CHECK(assign_profile(model, q).cluster == 0);

  // A degenerate trait contributes nothing to the distance.
  ProfileModel degen = model;
  degen.trait_std = {1.0, 1.0, 1.0, 0.0};
  degen.centroids = {{0.0, 0.0, 0.0, 0.0}, {2.0, 2.0, 2.0, 0.0}};
  q.values = {2.0, 2.0, 2.0, 1e9};
  CHECK(assign_profile(degen, q).cluster == 1);

  CHECK_THROWS_AS(assign_profile(ProfileModel{}, q), InputError);
}

TEST_CASE("personal baselines average calibration seconds") {
  std::vector<FeatureVector> seconds(3);
  seconds[0].values[kAvgPupilSize] = 300.0;
  seconds[0].values[kBlinkCount] = 1.0;
  seconds[1].values[kAvgPupilSize] = 0.0;
  seconds[1].values[kBlinkCount] = 2.0;
  seconds[1].flags = kFlagNoPupil;  // excluded from the pupil mean only
  seconds[2].values[kAvgPupilSize] = 400.0;
  seconds[2].values[kBlinkCount] = 3.0;

  const Baselines b = personal_baselines(seconds);
  CHECK(b.pupil_mean == 350.0);
  CHECK(b.blink_mean == 2.0);
  CHECK(b.warnings.empty());

  const std::vector<Level> one_level = {Level::Low, Level::Low, Level::Low};
  const Baselines warned = personal_baselines(seconds, &one_level);
  REQUIRE(warned.warnings.size() == 1);
  CHECK(warned.warnings[0].find("single difficulty level") != std::string::npos);
  const std::vector<Level> two_levels = {Level::Low, Level::High, Level::Low};
  CHECK(personal_baselines(seconds, &two_levels).warnings.empty());

  CHECK_THROWS_AS(personal_baselines({}), InputError);
}

TEST_CASE("profile model and profile rows round-trip through JSON") {
  const FitResult fit = fit_profiles(three_blobs(), {2, 3, 4, 5}, 42);
  const ProfileModel back = profile_model_from_json(profile_model_to_json(fit.model));
  CHECK(back.k == fit.model.k);
  CHECK(back.trait_mean == fit.model.trait_mean);
  CHECK(back.trait_std == fit.model.trait_std);
  CHECK(back.centroids == fit.model.centroids);
  CHECK(back.names == fit.model.names);
  CHECK(back.seed == fit.model.seed);
  CHECK_THROWS_AS(profile_model_from_json("{oops"), ParseError);
  CHECK_THROWS_AS(profile_model_from_json(
                      R"({"k":2,"trait_mean":[0,0,0,0],"trait_std":[1,1,1,1],)"
                      R"("centroids":[[0,0,0,0]],"names":["only-one"],"seed":1})"),
                  ParseError);

  UserProfile p;
  p.user_id = "u03";
  p.cluster = 2;
  p.profile_name = "Restless";
  p.traits.user_id = "u03";
  p.traits.values = {2.0, 60.0, 200.0, 11.0};
  p.baselines.pupil_mean = 201.5;
  p.baselines.blink_mean = 2.1;
  p.baselines.warnings.push_back("calibration covers a single difficulty level");
  const auto rows = profiles_from_jsonl(profiles_to_jsonl({p}));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].user_id == "u03");
  CHECK(rows[0].cluster == 2);
  CHECK(rows[0].profile_name == "Restless");
  CHECK(rows[0].traits.values == p.traits.values);
  CHECK(rows[0].baselines.pupil_mean == 201.5);
  CHECK(rows[0].baselines.blink_mean == 2.1);
  REQUIRE(rows[0].baselines.warnings.size() == 1);
  CHECK_THROWS_AS(profiles_from_jsonl("{bad"), ParseError);
}
