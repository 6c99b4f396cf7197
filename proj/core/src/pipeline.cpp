#include "gazeload/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <set>
#include <tuple>

#include "gazeload/error.hpp"
#include "gazeload/features.hpp"
#include "gazeload/ingest.hpp"
#include "gazeload/inject.hpp"
#include "gazeload/io.hpp"
#include "gazeload/retrieval.hpp"
#include "gazeload/rng.hpp"

namespace gazeload {

Dataset dataset_from_synth(const SynthDataset& synth, double train_ratio,
                           std::uint64_t split_seed) {
  std::vector<std::string> ids;
  for (const SynthUser& u : synth.users) ids.push_back(u.user_id);
  const SplitManifest split = split_users(ids, train_ratio, split_seed);
  Dataset data;
  data.recordings = synth.recordings;
  data.labels = synth.labels;
  data.train_users = split.train;
  data.test_users = split.test;
  return data;
}

Dataset load_dataset(const std::string& raw_dir, const std::string& labels_path,
                     const std::string& split_path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(raw_dir)) {
    throw InputError("raw directory not found: " + raw_dir);
  }

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(raw_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .csv recordings in " + raw_dir);

  Dataset data;
  for (const std::string& path : files) {
    const std::string stem = fs::path(path).stem().string();
    const std::size_t sep = stem.rfind('_');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= stem.size()) {
      throw InputError("recording file name '" + stem +
                       ".csv' is not of the form <user>_<task>.csv");
    }
    GazeRecording rec = ingest_recording(path);
    rec.user_id = stem.substr(0, sep);
    rec.task = parse_task(stem.substr(sep + 1));
    data.recordings.push_back(std::move(rec));
  }

  data.labels = labels_from_csv_text(read_file(labels_path));
  const SplitManifest split = split_from_text(read_file(split_path));
  data.train_users = split.train;
  data.test_users = split.test;
  return data;
}

GuidanceRule generic_rule(TaskId task) {
  GuidanceRule rule;
  rule.task = task;
  rule.provenance = "generic";
  rule.entries = {
      {kAvgPupilSize, 1, '+', -0.5, 0.5},
      {kFixDur, 2, '+', -0.5, 0.5},
      {kBlinkCount, 3, '-', -0.5, 0.5},
  };
  rule.prompt_text =
      "Generic physiology: pupil dilation and longer fixations accompany higher "
      "load; blink suppression accompanies higher load.";
  return rule;
}

namespace {

using TruthKey = std::tuple<std::string, int, int>;  // user, task, second

TruthKey key_of(const LabeledSecond& l) {
  return {l.user, static_cast<int>(l.task), l.second};
}

}  // namespace

PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.eval_tasks.empty()) throw InputError("pipeline: no evaluation tasks");
  if (data.train_users.empty()) throw InputError("pipeline: no training users");
  if (data.test_users.empty()) throw InputError("pipeline: no test users");

  std::vector<std::string> train_users = data.train_users;
  std::vector<std::string> test_users = data.test_users;
  std::sort(train_users.begin(), train_users.end());
  std::sort(test_users.begin(), test_users.end());
  const std::set<std::string> train_set(train_users.begin(), train_users.end());
  const std::set<std::string> test_set(test_users.begin(), test_users.end());

  PipelineResult result;

  // Ground truth stays clean for scoring; the supervision copy may get
  // label noise injected on the training side.
  std::map<TruthKey, Level> truth;
  for (const LabeledSecond& l : data.labels) truth[key_of(l)] = l.level;

  std::map<TruthKey, Level> supervision = truth;
  if (cfg.label_noise > 0.0) {
    std::vector<LabeledSecond> train_labels;
    for (const LabeledSecond& l : data.labels) {
      if (train_set.count(l.user)) train_labels.push_back(l);
    }
    const NoiseResult noisy = inject_label_noise(train_labels, cfg.label_noise,
                                                 mix_seed(cfg.perturb_seed, 0x6000));
    for (const LabeledSecond& l : noisy.labels) supervision[key_of(l)] = l.level;
  }

  // Featurize every recording, injecting missing samples into the test-side
  // evaluation recordings first when requested.
  const std::set<int> eval_task_set = [&] {
    std::set<int> s;
    for (TaskId t : cfg.eval_tasks) s.insert(static_cast<int>(t));
    return s;
  }();

  std::map<std::pair<std::string, int>, std::size_t> rec_index;
  std::vector<GazeRecording> recordings = data.recordings;
  std::vector<FeatureSeries> raw_series(recordings.size());
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    GazeRecording& rec = recordings[i];
    const std::pair<std::string, int> key{rec.user_id, static_cast<int>(rec.task)};
    if (rec_index.count(key)) {
      throw InputError("pipeline: duplicate recording for " + rec.user_id + "/" +
                       to_string(rec.task));
    }
    rec_index[key] = i;
    if (cfg.missing_ratio > 0.0 && test_set.count(rec.user_id) &&
        eval_task_set.count(static_cast<int>(rec.task))) {
      rec = inject_missing(rec, cfg.missing_ratio,
                           mix_seed(cfg.perturb_seed, 0x5000 + static_cast<std::uint64_t>(i)))
                .recording;
    }
    raw_series[i] = featurize_recording(rec);
  }

  auto series_of = [&](const std::string& user, TaskId task) -> const FeatureSeries& {
    const auto it = rec_index.find({user, static_cast<int>(task)});
    if (it == rec_index.end()) {
      throw InputError("pipeline: no recording for " + user + "/" + to_string(task));
    }
    return raw_series[it->second];
  };
  auto recording_of = [&](const std::string& user, TaskId task) -> const GazeRecording& {
    return recordings[rec_index.at({user, static_cast<int>(task)})];
  };

  // Population statistics from the training users' evaluation-task seconds.
  {
    std::vector<FeatureVector> train_seconds;
    for (const std::string& user : train_users) {
      for (TaskId task : cfg.eval_tasks) {
        const FeatureSeries& s = series_of(user, task);
        train_seconds.insert(train_seconds.end(), s.seconds.begin(), s.seconds.end());
      }
    }
    result.stats = fit_population_stats(train_seconds, "train");
  }

  std::map<std::pair<std::string, int>, FeatureSeries> zcache;
  auto zseries_of = [&](const std::string& user, TaskId task) -> const FeatureSeries& {
    const std::pair<std::string, int> key{user, static_cast<int>(task)};
    auto it = zcache.find(key);
    if (it == zcache.end()) {
      it = zcache.emplace(key, normalize(series_of(user, task), result.stats)).first;
    }
    return it->second;
  };

  auto supervised_level = [&](const std::string& user, TaskId task,
                              int second) -> const Level* {
    const auto it = supervision.find({user, static_cast<int>(task), second});
    return it == supervision.end() ? nullptr : &it->second;
  };

  // Task rules from grouped statistics over the training split.
  if (cfg.use_rules) {
    for (TaskId task : cfg.eval_tasks) {
      std::vector<FeatureVector> seconds;
      std::vector<Level> levels;
      for (const std::string& user : train_users) {
        const FeatureSeries& z = zseries_of(user, task);
        for (const FeatureVector& fv : z.seconds) {
          const Level* lvl = supervised_level(user, task, fv.second);
          if (lvl == nullptr) continue;
          seconds.push_back(fv);
          levels.push_back(*lvl);
        }
      }
      const GroupedStats gs = grouped_stats(seconds, levels, task);
      RuleGenOptions opt;
      opt.min_sep = cfg.min_separation;
      GuidanceRule rule = generate_rule(gs, cfg.rule_client, opt);
      for (const std::string& w : rule.warnings) {
        result.warnings.push_back(std::string(to_string(task)) + " rule: " + w);
      }
      result.rules.rules.push_back(std::move(rule));
    }
  }

  // User profiles: fit on training users (all tasks), assign test users from
  // their calibration session only.
  std::map<std::string, UserProfile> profile_by_user;
  if (cfg.use_profiles) {
    std::vector<TraitVector> train_traits;
    for (const std::string& user : train_users) {
      TraitAccumulator acc;
      for (TaskId task : cfg.eval_tasks) {
        acc.add(series_of(user, task), recording_of(user, task));
      }
      acc.add(series_of(user, cfg.calibration_task),
              recording_of(user, cfg.calibration_task));
      train_traits.push_back(acc.finish(user));
    }
    FitResult fit = fit_profiles(train_traits, cfg.k_range, cfg.profile_seed);
    for (const std::string& w : fit.warnings) {
      result.warnings.push_back("profiles: " + w);
    }
    result.profile_model = fit.model;

    auto build_profile = [&](const std::string& user, const TraitVector& traits,
                             int cluster) {
      UserProfile p;
      p.user_id = user;
      p.cluster = cluster;
      p.profile_name = fit.model.names[static_cast<std::size_t>(cluster)];
      p.traits = traits;
      const FeatureSeries& cal = series_of(user, cfg.calibration_task);
      std::vector<Level> cal_levels;
      std::vector<FeatureVector> cal_seconds;
      for (const FeatureVector& fv : cal.seconds) {
        const Level* lvl = supervised_level(user, cfg.calibration_task, fv.second);
        if (lvl == nullptr) continue;
        cal_seconds.push_back(fv);
        cal_levels.push_back(*lvl);
      }
      if (cal_seconds.empty()) {
        cal_seconds = cal.seconds;  // unlabeled calibration: baselines only
        p.baselines = personal_baselines(cal_seconds, nullptr);
      } else {
        p.baselines = personal_baselines(cal_seconds, &cal_levels);
      }
      for (const std::string& w : p.baselines.warnings) {
        result.warnings.push_back(user + " baselines: " + w);
      }
      profile_by_user[user] = std::move(p);
    };

    for (std::size_t i = 0; i < train_traits.size(); ++i) {
      build_profile(train_users[i], train_traits[i], fit.assignments[i]);
    }
    for (const std::string& user : test_users) {
      TraitAccumulator acc;
      acc.add(series_of(user, cfg.calibration_task),
              recording_of(user, cfg.calibration_task));
      const TraitVector traits = acc.finish(user);
      const ProfileAssignment a = assign_profile(fit.model, traits);
      build_profile(user, traits, a.cluster);
    }
    for (const std::string& user : train_users) {
      result.profiles.push_back(profile_by_user.at(user));
    }
    for (const std::string& user : test_users) {
      result.profiles.push_back(profile_by_user.at(user));
    }
  }

  // Retrieval database over the training users' evaluation windows.
  RetrievalDb db;
  if (cfg.use_retrieval) {
    std::vector<RetrievalRecord> records;
    for (const std::string& user : train_users) {
      for (TaskId task : cfg.eval_tasks) {
        const FeatureSeries& z = zseries_of(user, task);
        const int duration = static_cast<int>(z.seconds.size());
        for (int end = cfg.window - 1; end < duration; end += cfg.window) {
          // Majority supervision label over the window; ties go to the
          // label of the window's end second.
          std::array<int, 3> counts{};
          const Level* end_level = nullptr;
          for (int s = end - cfg.window + 1; s <= end; ++s) {
            const Level* lvl = supervised_level(user, task, s);
            if (lvl == nullptr) continue;
            ++counts[static_cast<int>(*lvl)];
            if (s == end) end_level = lvl;
          }
          const int total = counts[0] + counts[1] + counts[2];
          if (total == 0) continue;
          int best = 0;
          bool unique = true;
          for (int l = 1; l < 3; ++l) {
            if (counts[l] > counts[best]) {
              best = l;
              unique = true;
            } else if (counts[l] == counts[best]) {
              unique = false;
            }
          }
          Level label = static_cast<Level>(best);
          if (!unique && end_level != nullptr) label = *end_level;

          RetrievalRecord rec;
          rec.user_id = user;
          rec.task = task;
          rec.window_id = end;
          rec.profile = cfg.use_profiles ? profile_by_user.at(user).profile_name
                                         : std::string("population");
          rec.label = label;
          rec.table = build_table(z, end, cfg.window);
          rec.descriptor = descriptor(rec.table);
          records.push_back(std::move(rec));
        }
      }
    }
    db = RetrievalDb::build(std::move(records), train_set);
  }

  // Predict the test users' sessions and score per second.
  const std::string backend = cfg.client ? cfg.client->name() : "mock";
  for (const std::string& user : test_users) {
    for (TaskId task : cfg.eval_tasks) {
      const FeatureSeries& z = zseries_of(user, task);
      const GuidanceRule rule =
          cfg.use_rules ? select_rule(result.rules, task) : generic_rule(task);

      SessionContext ctx;
      ctx.rule = &rule;
      ctx.generic_guidance = !cfg.use_rules;
      ctx.profile = cfg.use_profiles ? &profile_by_user.at(user) : nullptr;
      ctx.db = cfg.use_retrieval ? &db : nullptr;
      ctx.client = cfg.client;
      ctx.window = cfg.window;
      ctx.k = cfg.k;
      ctx.exclude_same_user = cfg.exclude_same_user;
      ctx.flattened_cosine = cfg.flattened_cosine;

      const SessionResult session = run_session(z, ctx);
      for (const WindowPrediction& wp : session.windows) {
        PredictionLogEntry e;
        e.user = user;
        e.task = task;
        e.window_end = wp.end_second;
        e.label = wp.label;
        e.reasoning = wp.reasoning;
        e.latency_seconds = wp.latency_seconds;
        e.backend = wp.carried ? "carried" : backend;
        e.carried = wp.carried;
        e.parse_failed = wp.parse_failed;
        result.log.push_back(std::move(e));
      }
      for (const SecondPrediction& sp : session.seconds) {
        const auto it = truth.find({user, static_cast<int>(task), sp.second});
        if (it == truth.end()) continue;
        EvalPair pair;
        pair.user = user;
        pair.truth = it->second;
        pair.pred = sp.label;
        pair.parse_failed = sp.parse_failed;
        result.pairs.push_back(std::move(pair));
      }
    }
  }

  result.report = compute_metrics(confusion(result.pairs));
  result.metrics_csv = metric_report_to_csv(result.report);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace gazeload
