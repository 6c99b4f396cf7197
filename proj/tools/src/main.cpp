// gazeload: command-line front end for the cognitive-load pipeline.
//
// One subcommand per pipeline stage; files are the interfaces between
// stages. All writes are atomic (temp file + rename). Exit codes: 0 success,
// 1 runtime/input error (one line on stderr), 2 usage error.

#include <algorithm>
#include <array>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gazeload/ablation.hpp"
#include "gazeload/config.hpp"
#include "gazeload/counterfactual.hpp"
#include "gazeload/csv.hpp"
#include "gazeload/error.hpp"
#include "gazeload/features.hpp"
#include "gazeload/inference.hpp"
#include "gazeload/ingest.hpp"
#include "gazeload/inject.hpp"
#include "gazeload/io.hpp"
#include "gazeload/labels.hpp"
#include "gazeload/llm_client.hpp"
#include "gazeload/metrics.hpp"
#include "gazeload/pipeline.hpp"
#include "gazeload/profiles.hpp"
#include "gazeload/retrieval.hpp"
#include "gazeload/rng.hpp"
#include "gazeload/rules.hpp"
#include "gazeload/synth.hpp"
#include "gazeload/types.hpp"

namespace {

using namespace gazeload;
namespace fs = std::filesystem;

// Global state shared by the subcommand callbacks. The config file (when
// given) supplies defaults; explicitly passed flags win.
struct Ctx {
  std::string config_path;
  std::uint64_t seed_flag = 7;
  CLI::Option* seed_opt = nullptr;

  RunConfig base() const {
    RunConfig rc;
    if (!config_path.empty()) rc = load_run_config(config_path);
    if (seed_opt != nullptr && seed_opt->count() > 0) rc.seed = seed_flag;
    return rc;
  }
};

template <typename T>
void override_if(const CLI::Option* opt, T& target, const T& value) {
  if (opt != nullptr && opt->count() > 0) target = value;
}

std::vector<TaskId> parse_task_list(const std::string& csv) {
  std::vector<TaskId> tasks;
  for (const std::string& tok : split(csv, ',')) {
    if (trim(tok).empty()) continue;
    tasks.push_back(parse_task(trim(tok)));
  }
  if (tasks.empty()) throw InputError("empty task list");
  return tasks;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (const std::string& tok : split(csv, ',')) {
    if (trim(tok).empty()) continue;
    try {
      out.push_back(std::stoi(trim(tok)));
    } catch (const std::exception&) {
      throw InputError("bad integer list entry '" + tok + "'");
    }
  }
  return out;
}

std::vector<FeatureSeries> load_features(const std::string& path) {
  return features_from_csv_text(read_file(path));
}

const FeatureSeries* find_series(const std::vector<FeatureSeries>& all,
                                 const std::string& user, TaskId task) {
  for (const FeatureSeries& s : all) {
    if (s.user_id == user && s.task == task) return &s;
  }
  return nullptr;
}

const FeatureSeries& require_series(const std::vector<FeatureSeries>& all,
                                    const std::string& user, TaskId task) {
  const FeatureSeries* s = find_series(all, user, task);
  if (s == nullptr) {
    throw InputError("no feature rows for " + user + "/" + to_string(task));
  }
  return *s;
}

using LabelMap = std::map<std::tuple<std::string, int, int>, Level>;

LabelMap label_map(const std::vector<LabeledSecond>& labels) {
  LabelMap m;
  for (const LabeledSecond& l : labels) {
    m[{l.user, int(l.task), l.second}] = l.level;
  }
  return m;
}

std::map<std::string, UserProfile> profile_map(const std::string& path) {
  std::map<std::string, UserProfile> m;
  if (path.empty()) return m;
  for (UserProfile& p : profiles_from_jsonl(read_file(path))) {
    m[p.user_id] = std::move(p);
  }
  return m;
}

std::unique_ptr<LlmClient> make_client(const RunConfig& rc) {
  if (rc.backend == "mock") return nullptr;
  if (std::getenv(rc.api_key_env.c_str()) == nullptr) {
    throw ConfigError("remote backend needs the " + rc.api_key_env +
                      " environment variable");
  }
  RemoteClientConfig c;
  c.base_url = rc.endpoint;
  c.path = rc.api_path;
  c.model = rc.model;
  c.api_key_env = rc.api_key_env;
  return make_remote_client(c);
}

// Ingests every <user>_<task>.csv under dir, in sorted file order.
std::vector<GazeRecording> ingest_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InputError("raw directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .csv recordings in " + dir);
  std::vector<GazeRecording> recs(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string stem = fs::path(files[i]).stem().string();
    const std::size_t sep = stem.rfind('_');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= stem.size()) {
      throw InputError("recording file name '" + stem +
                       ".csv' is not of the form <user>_<task>.csv");
    }
    recs[i] = ingest_recording(files[i]);
    recs[i].user_id = stem.substr(0, sep);
    recs[i].task = parse_task(stem.substr(sep + 1));
  }
  return recs;
}

// ---------------------------------------------------------------- synth ----

void add_synth(CLI::App& app, Ctx& ctx) {
  auto opts = std::make_shared<SynthConfig>();
  auto out_dir = std::make_shared<std::string>("data");
  CLI::App* sub = app.add_subcommand("synth", "Generate a synthetic gaze cohort");
  sub->add_option("--users", opts->users, "Number of users")->capture_default_str();
  sub->add_option("--seconds", opts->seconds_per_task, "Seconds per task")
      ->capture_default_str();
  sub->add_option("--noise", opts->noise, "Noise scale (>= 0)")->capture_default_str();
  sub->add_option("--rate", opts->rate_hz, "Sampling rate in Hz")->capture_default_str();
  sub->add_option("--prefix", opts->user_prefix, "User id prefix")->capture_default_str();
  sub->add_option("--out", *out_dir, "Output directory")->capture_default_str();
  sub->callback([&ctx, opts, out_dir] {
    opts->seed = ctx.base().seed;
    const SynthDataset data = synth_generate(*opts);
    const fs::path dir(*out_dir);
    for (const GazeRecording& rec : data.recordings) {
      const fs::path path = dir / "raw" /
                            (rec.user_id + "_" + std::string(to_string(rec.task)) + ".csv");
      atomic_write_file(path.string(), recording_to_csv(rec));
    }
    atomic_write_file((dir / "labels.csv").string(), labels_to_csv(data.labels));
    atomic_write_file((dir / "users.csv").string(), users_to_csv(data.users));
    atomic_write_file((dir / "spans.csv").string(), spans_to_csv(data.spans));
    std::cout << "wrote " << data.recordings.size() << " recordings, "
              << data.labels.size() << " labeled seconds under " << *out_dir << "\n";
  });
}

// ---------------------------------------------------------------- split ----

void add_split(CLI::App& app, Ctx& ctx) {
  auto users_csv = std::make_shared<std::string>();
  auto ratio = std::make_shared<double>(0.5);
  auto out = std::make_shared<std::string>("split.txt");
  CLI::App* sub = app.add_subcommand("split", "Split users into train/test");
  sub->add_option("--users-csv", *users_csv, "users.csv (user,archetype)")->required();
  sub->add_option("--ratio", *ratio, "Train fraction")->capture_default_str();
  sub->add_option("--out", *out, "Output manifest")->capture_default_str();
  sub->callback([&ctx, users_csv, ratio, out] {
    std::vector<std::string> ids;
    for (const SynthUser& u : users_from_csv_text(read_file(*users_csv))) {
      ids.push_back(u.user_id);
    }
    const SplitManifest split = split_users(ids, *ratio, ctx.base().seed);
    atomic_write_file(*out, split_to_text(split));
    std::cout << "train " << split.train.size() << " / test " << split.test.size()
              << " users -> " << *out << "\n";
  });
}

// ---------------------------------------------------------- interpolate ----

void add_interpolate(CLI::App& app) {
  auto reports_path = std::make_shared<std::string>();
  auto spans_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>("labels.csv");
  CLI::App* sub =
      app.add_subcommand("interpolate", "Expand sparse load reports to per-second labels");
  sub->add_option("--reports", *reports_path, "reports.csv")->required();
  sub->add_option("--spans", *spans_path, "spans.csv")->required();
  sub->add_option("--out", *out, "Output labels.csv")->capture_default_str();
  sub->callback([reports_path, spans_path, out] {
    const auto reports = reports_from_csv_text(read_file(*reports_path));
    const auto spans = spans_from_csv_text(read_file(*spans_path));

    // Group both inputs by (user, task), keeping first-seen order.
    std::vector<std::pair<std::string, TaskId>> groups;
    auto group_of = [&groups](const std::string& user, TaskId task) {
      for (const auto& g : groups) {
        if (g.first == user && g.second == task) return;
      }
      groups.emplace_back(user, task);
    };
    for (const auto& r : reports) group_of(r.user, r.task);

    std::vector<LabeledSecond> labels;
    for (const auto& [user, task] : groups) {
      std::vector<LoadReport> group_reports;
      for (const auto& r : reports) {
        if (r.user == user && r.task == task) group_reports.push_back(r);
      }
      std::vector<TaskSpan> group_spans;
      for (const auto& s : spans) {
        if (s.user == user && s.task == task) group_spans.push_back(s.span);
      }
      if (group_spans.empty()) {
        throw InputError("no task spans for " + user + "/" + to_string(task));
      }
      const auto expanded = interpolate_labels(group_reports, group_spans, user, task);
      labels.insert(labels.end(), expanded.begin(), expanded.end());
    }
    atomic_write_file(*out, labels_to_csv(labels));
    std::cout << "interpolated " << labels.size() << " labeled seconds -> " << *out << "\n";
  });
}

// --------------------------------------------------------- inject-noise ----

void add_inject_noise(CLI::App& app, Ctx& ctx) {
  auto labels_path = std::make_shared<std::string>();
  auto rate = std::make_shared<double>(0.1);
  auto out = std::make_shared<std::string>();
  CLI::App* sub = app.add_subcommand("inject-noise", "Flip labels to adjacent levels");
  sub->add_option("--labels", *labels_path, "Input labels.csv")->required();
  sub->add_option("--rate", *rate, "Flip fraction")->capture_default_str();
  sub->add_option("--out", *out, "Output labels.csv")->required();
  sub->callback([&ctx, labels_path, rate, out] {
    const auto labels = labels_from_csv_text(read_file(*labels_path));
    const NoiseResult result = inject_label_noise(labels, *rate, ctx.base().seed);
    atomic_write_file(*out, labels_to_csv(result.labels));
    std::cout << "flipped " << result.flipped << " of " << labels.size()
              << " labels -> " << *out << "\n";
  });
}

// ------------------------------------------------------- inject-missing ----

void add_inject_missing(CLI::App& app, Ctx& ctx) {
  auto in = std::make_shared<std::string>();
  auto ratio = std::make_shared<double>(0.3);
  auto out = std::make_shared<std::string>();
  CLI::App* sub =
      app.add_subcommand("inject-missing", "Drop and re-interpolate valid gaze samples");
  sub->add_option("--raw", *in, "Input recording csv")->required();
  sub->add_option("--ratio", *ratio, "Fraction of valid samples to drop")
      ->capture_default_str();
  sub->add_option("--out", *out, "Output recording csv")->required();
  sub->callback([&ctx, in, ratio, out] {
    GazeRecording rec = ingest_recording(*in);
    const MissingResult result = inject_missing(rec, *ratio, ctx.base().seed);
    atomic_write_file(*out, recording_to_csv(result.recording));
    std::cout << "dropped and refilled " << result.dropped << " samples -> " << *out
              << "\n";
  });
}

// ------------------------------------------------------------ featurize ----

void add_featurize(CLI::App& app, Ctx& ctx) {
  auto raw_dir = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>("features.csv");
  auto ivt = std::make_shared<IvtConfig>();
  auto jobs = std::make_shared<int>(1);
  CLI::App* sub = app.add_subcommand("featurize", "Per-second gaze features from raw CSVs");
  sub->add_option("--raw", *raw_dir, "Directory of <user>_<task>.csv recordings")
      ->required();
  sub->add_option("--out", *out, "Output features.csv")->capture_default_str();
  sub->add_option("--threshold", ivt->velocity_threshold_deg_s,
                  "Saccade velocity threshold, deg/s")
      ->capture_default_str();
  sub->add_option("--blink-min", ivt->blink_min_ms, "Min blink duration, ms")
      ->capture_default_str();
  sub->add_option("--blink-max", ivt->blink_max_ms, "Max blink duration, ms")
      ->capture_default_str();
  sub->add_option("--min-fixation", ivt->min_fixation_ms,
                  "Merge fixations shorter than this, ms")
      ->capture_default_str();
  CLI::Option* jobs_opt = sub->add_option("--jobs", *jobs, "Worker threads")
                              ->capture_default_str();
  sub->callback([&ctx, raw_dir, out, ivt, jobs, jobs_opt] {
    int n_jobs = *jobs;
    override_if(jobs_opt, n_jobs, *jobs);
    if (jobs_opt->count() == 0) n_jobs = ctx.base().jobs;
    if (n_jobs < 1) throw ConfigError("jobs must be >= 1");

    const std::vector<GazeRecording> recs = ingest_dir(*raw_dir);
    std::vector<FeatureSeries> series(recs.size());
    const int workers = std::min<int>(n_jobs, int(recs.size()));
    if (workers <= 1) {
      for (std::size_t i = 0; i < recs.size(); ++i) {
        series[i] = featurize_recording(recs[i], *ivt);
      }
    } else {
      std::vector<std::thread> pool;
      std::size_t next = 0;
      std::mutex mu;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (;;) {
            std::size_t i;
            {
              std::lock_guard<std::mutex> lock(mu);
              if (next >= recs.size()) return;
              i = next++;
            }
            series[i] = featurize_recording(recs[i], *ivt);
          }
        });
      }
      for (std::thread& t : pool) t.join();
    }
    atomic_write_file(*out, features_to_csv(series));
    std::size_t rows = 0;
    for (const auto& s : series) rows += s.seconds.size();
    std::cout << "featurized " << recs.size() << " recordings (" << rows
              << " seconds) -> " << *out << "\n";
  });
}

// ---------------------------------------------------------------- stats ----

void add_stats(CLI::App& app) {
  auto features_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto tasks_csv = std::make_shared<std::string>("reading,gaming");
  auto out = std::make_shared<std::string>("stats.json");
  CLI::App* sub = app.add_subcommand("stats", "Fit population statistics on the train split");
  sub->add_option("--features", *features_path, "features.csv")->required();
  sub->add_option("--split", *split_path, "Split manifest")->required();
  sub->add_option("--tasks", *tasks_csv, "Tasks included")->capture_default_str();
  sub->add_option("--out", *out, "Output stats.json")->capture_default_str();
  sub->callback([features_path, split_path, tasks_csv, out] {
    const auto series = load_features(*features_path);
    const SplitManifest split = split_from_text(read_file(*split_path));
    const std::set<std::string> train(split.train.begin(), split.train.end());
    const auto tasks = parse_task_list(*tasks_csv);
    std::vector<FeatureVector> seconds;
    for (const FeatureSeries& s : series) {
      if (!train.count(s.user_id)) continue;
      if (std::find(tasks.begin(), tasks.end(), s.task) == tasks.end()) continue;
      seconds.insert(seconds.end(), s.seconds.begin(), s.seconds.end());
    }
    const PopulationStats stats = fit_population_stats(seconds, "train");
    atomic_write_file(*out, stats_to_json(stats) + "\n");
    std::cout << "fit population stats on " << stats.count << " seconds -> " << *out
              << "\n";
  });
}

// ------------------------------------------------------------- gen-rules ----

void add_gen_rules(CLI::App& app, Ctx& ctx) {
  auto features_path = std::make_shared<std::string>();
  auto labels_path = std::make_shared<std::string>();
  auto stats_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto tasks_csv = std::make_shared<std::string>("reading,gaming");
  auto min_sep = std::make_shared<double>(kDefaultMinSeparation);
  auto backend = std::make_shared<std::string>("fallback");
  auto out = std::make_shared<std::string>("rules.jsonl");
  CLI::App* sub = app.add_subcommand("gen-rules", "Derive per-task guidance rules");
  sub->add_option("--features", *features_path, "features.csv")->required();
  sub->add_option("--labels", *labels_path, "labels.csv")->required();
  sub->add_option("--stats", *stats_path, "stats.json")->required();
  sub->add_option("--split", *split_path, "Split manifest")->required();
  sub->add_option("--tasks", *tasks_csv, "Tasks to fit")->capture_default_str();
  sub->add_option("--min-sep", *min_sep, "Separation threshold")->capture_default_str();
  sub->add_option("--backend", *backend, "fallback | remote")->capture_default_str();
  sub->add_option("--out", *out, "Output rules.jsonl")->capture_default_str();
  sub->callback([&ctx, features_path, labels_path, stats_path, split_path, tasks_csv,
                 min_sep, backend, out] {
    RunConfig rc = ctx.base();
    if (*backend != "fallback" && *backend != "remote") {
      throw ConfigError("gen-rules backend must be 'fallback' or 'remote'");
    }
    rc.backend = *backend == "remote" ? "remote" : "mock";
    const auto client = make_client(rc);

    const auto series = load_features(*features_path);
    const PopulationStats stats = stats_from_json(read_file(*stats_path));
    const LabelMap labels = label_map(labels_from_csv_text(read_file(*labels_path)));
    const SplitManifest split = split_from_text(read_file(*split_path));
    const std::set<std::string> train(split.train.begin(), split.train.end());

    RuleStore store;
    for (TaskId task : parse_task_list(*tasks_csv)) {
      std::vector<FeatureVector> seconds;
      std::vector<Level> levels;
      for (const FeatureSeries& s : series) {
        if (!train.count(s.user_id) || s.task != task) continue;
        const FeatureSeries z = normalize(s, stats);
        for (const FeatureVector& fv : z.seconds) {
          const auto it = labels.find({s.user_id, int(task), fv.second});
          if (it == labels.end()) continue;
          seconds.push_back(fv);
          levels.push_back(it->second);
        }
      }
      const GroupedStats gs = grouped_stats(seconds, levels, task);
      RuleGenOptions opt;
      opt.min_sep = *min_sep;
      GuidanceRule rule = generate_rule(gs, client.get(), opt);
      std::cout << to_string(task) << ": " << rule.entries.size() << " entries ("
                << rule.provenance << ", stats " << rule.stats_digest << ")\n";
      for (const std::string& w : rule.warnings) {
        std::cerr << "warning: " << to_string(task) << ": " << w << "\n";
      }
      store.rules.push_back(std::move(rule));
    }
    atomic_write_file(*out, rules_to_jsonl(store));
    std::cout << "wrote " << store.rules.size() << " rules -> " << *out << "\n";
  });
}

// ----------------------------------------------------------- profile-fit ----

void add_profile_fit(CLI::App& app, Ctx& ctx) {
  auto raw_dir = std::make_shared<std::string>();
  auto labels_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto calibration = std::make_shared<std::string>("audio");
  auto k_range_csv = std::make_shared<std::string>("2,3,4,5");
  auto model_out = std::make_shared<std::string>("profile_model.json");
  auto out = std::make_shared<std::string>("profiles.jsonl");
  CLI::App* sub = app.add_subcommand("profile-fit", "Cluster train users into profiles");
  sub->add_option("--raw", *raw_dir, "Raw recordings directory")->required();
  sub->add_option("--labels", *labels_path, "labels.csv (calibration labels)")->required();
  sub->add_option("--split", *split_path, "Split manifest")->required();
  sub->add_option("--calibration", *calibration, "Calibration task")->capture_default_str();
  sub->add_option("--k-range", *k_range_csv, "Candidate cluster counts")
      ->capture_default_str();
  sub->add_option("--model-out", *model_out, "Output model json")->capture_default_str();
  sub->add_option("--out", *out, "Output profiles.jsonl")->capture_default_str();
  sub->callback([&ctx, raw_dir, labels_path, split_path, calibration, k_range_csv,
                 model_out, out] {
    const RunConfig rc = ctx.base();
    const TaskId cal_task = parse_task(*calibration);
    const auto recs = ingest_dir(*raw_dir);
    const LabelMap labels = label_map(labels_from_csv_text(read_file(*labels_path)));
    const SplitManifest split = split_from_text(read_file(*split_path));

    std::map<std::string, std::vector<const GazeRecording*>> by_user;
    for (const GazeRecording& rec : recs) by_user[rec.user_id].push_back(&rec);

    std::vector<TraitVector> traits;
    std::map<std::string, FeatureSeries> calibration_series;
    for (const std::string& user : split.train) {
      const auto it = by_user.find(user);
      if (it == by_user.end()) throw InputError("no recordings for train user " + user);
      TraitAccumulator acc;
      for (const GazeRecording* rec : it->second) {
        FeatureSeries raw = featurize_recording(*rec);
        if (rec->task == cal_task) calibration_series[user] = raw;
        acc.add(raw, *rec);
      }
      traits.push_back(acc.finish(user));
    }

    const FitResult fit = fit_profiles(traits, parse_int_list(*k_range_csv), rc.profile_seed);
    for (std::size_t i = 0; i < fit.k_range.size(); ++i) {
      std::cout << "k=" << fit.k_range[i] << " silhouette "
                << format_fixed(fit.silhouette_by_k[i], 4)
                << (fit.k_range[i] == fit.model.k ? "  (selected)" : "") << "\n";
    }
    for (const std::string& w : fit.warnings) std::cerr << "warning: " << w << "\n";

    std::vector<UserProfile> profiles;
    for (std::size_t i = 0; i < traits.size(); ++i) {
      UserProfile p;
      p.user_id = traits[i].user_id;
      p.cluster = fit.assignments[i];
      p.profile_name = fit.model.names[std::size_t(p.cluster)];
      p.traits = traits[i];
      const auto cal = calibration_series.find(p.user_id);
      if (cal != calibration_series.end()) {
        std::vector<Level> levels;
        std::vector<FeatureVector> seconds;
        for (const FeatureVector& fv : cal->second.seconds) {
          const auto it = labels.find({p.user_id, int(cal_task), fv.second});
          if (it == labels.end()) continue;
          seconds.push_back(fv);
          levels.push_back(it->second);
        }
        if (seconds.empty()) {
          p.baselines = personal_baselines(cal->second.seconds, nullptr);
        } else {
          p.baselines = personal_baselines(seconds, &levels);
        }
        for (const std::string& w : p.baselines.warnings) {
          std::cerr << "warning: " << p.user_id << ": " << w << "\n";
        }
      } else {
        throw InputError("no calibration recording for train user " + p.user_id);
      }
      profiles.push_back(std::move(p));
    }

    atomic_write_file(*model_out, profile_model_to_json(fit.model) + "\n");
    atomic_write_file(*out, profiles_to_jsonl(profiles));
    std::cout << "fit k=" << fit.model.k << " profiles for " << profiles.size()
              << " users -> " << *out << "\n";
  });
}

// -------------------------------------------------------- profile-assign ----

void add_profile_assign(CLI::App& app) {
  auto raw_dir = std::make_shared<std::string>();
  auto labels_path = std::make_shared<std::string>();
  auto model_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto users_csv = std::make_shared<std::string>();
  auto calibration = std::make_shared<std::string>("audio");
  auto out = std::make_shared<std::string>("profiles_test.jsonl");
  CLI::App* sub =
      app.add_subcommand("profile-assign", "Assign users to fitted profiles");
  sub->add_option("--raw", *raw_dir, "Raw recordings directory")->required();
  sub->add_option("--labels", *labels_path, "labels.csv (calibration labels)")->required();
  sub->add_option("--model", *model_path, "profile model json")->required();
  CLI::Option* split_opt =
      sub->add_option("--split", *split_path, "Split manifest (assigns the test side)");
  CLI::Option* users_opt = sub->add_option("--users", *users_csv, "Comma-separated users");
  split_opt->excludes(users_opt);
  sub->add_option("--calibration", *calibration, "Calibration task")->capture_default_str();
  sub->add_option("--out", *out, "Output profiles.jsonl")->capture_default_str();
  sub->callback([raw_dir, labels_path, model_path, split_path, users_csv, calibration,
                 out] {
    const TaskId cal_task = parse_task(*calibration);
    const ProfileModel model = profile_model_from_json(read_file(*model_path));
    const LabelMap labels = label_map(labels_from_csv_text(read_file(*labels_path)));

    std::vector<std::string> users;
    if (!split_path->empty()) {
      users = split_from_text(read_file(*split_path)).test;
    } else {
      for (const std::string& tok : split(*users_csv, ',')) {
        if (!trim(tok).empty()) users.push_back(trim(tok));
      }
    }
    if (users.empty()) throw InputError("no users given (use --split or --users)");
    std::sort(users.begin(), users.end());

    const auto recs = ingest_dir(*raw_dir);
    std::vector<UserProfile> profiles;
    for (const std::string& user : users) {
      const GazeRecording* cal_rec = nullptr;
      for (const GazeRecording& rec : recs) {
        if (rec.user_id == user && rec.task == cal_task) cal_rec = &rec;
      }
      if (cal_rec == nullptr) {
        throw InputError("no calibration recording for user " + user);
      }
      const FeatureSeries raw = featurize_recording(*cal_rec);
      TraitAccumulator acc;
      acc.add(raw, *cal_rec);
      const TraitVector traits = acc.finish(user);
      const ProfileAssignment a = assign_profile(model, traits);

      UserProfile p;
      p.user_id = user;
      p.cluster = a.cluster;
      p.profile_name = a.name;
      p.traits = traits;
      std::vector<Level> levels;
      std::vector<FeatureVector> seconds;
      for (const FeatureVector& fv : raw.seconds) {
        const auto it = labels.find({user, int(cal_task), fv.second});
        if (it == labels.end()) continue;
        seconds.push_back(fv);
        levels.push_back(it->second);
      }
      if (seconds.empty()) {
        p.baselines = personal_baselines(raw.seconds, nullptr);
      } else {
        p.baselines = personal_baselines(seconds, &levels);
      }
      for (const std::string& w : p.baselines.warnings) {
        std::cerr << "warning: " << user << ": " << w << "\n";
      }
      profiles.push_back(std::move(p));
    }
    atomic_write_file(*out, profiles_to_jsonl(profiles));
    std::cout << "assigned " << profiles.size() << " users -> " << *out << "\n";
  });
}

// -------------------------------------------------------------- build-db ----

void add_build_db(CLI::App& app, Ctx& ctx) {
  auto features_path = std::make_shared<std::string>();
  auto labels_path = std::make_shared<std::string>();
  auto stats_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto profiles_path = std::make_shared<std::string>();
  auto tasks_csv = std::make_shared<std::string>("reading,gaming");
  auto window = std::make_shared<int>(5);
  auto out = std::make_shared<std::string>("db.jsonl");
  CLI::App* sub = app.add_subcommand("build-db", "Build the retrieval database");
  sub->add_option("--features", *features_path, "features.csv")->required();
  sub->add_option("--labels", *labels_path, "labels.csv")->required();
  sub->add_option("--stats", *stats_path, "stats.json")->required();
  sub->add_option("--split", *split_path, "Split manifest")->required();
  sub->add_option("--profiles", *profiles_path, "profiles.jsonl (optional)");
  sub->add_option("--tasks", *tasks_csv, "Tasks included")->capture_default_str();
  CLI::Option* window_opt =
      sub->add_option("--window", *window, "Window length")->capture_default_str();
  sub->add_option("--out", *out, "Output db.jsonl")->capture_default_str();
  sub->callback([&ctx, features_path, labels_path, stats_path, split_path, profiles_path,
                 tasks_csv, window, window_opt, out] {
    RunConfig rc = ctx.base();
    override_if(window_opt, rc.window, *window);
    const int T = rc.window;

    const auto series = load_features(*features_path);
    const PopulationStats stats = stats_from_json(read_file(*stats_path));
    const LabelMap labels = label_map(labels_from_csv_text(read_file(*labels_path)));
    const SplitManifest split = split_from_text(read_file(*split_path));
    const std::set<std::string> train(split.train.begin(), split.train.end());
    const auto profiles = profile_map(*profiles_path);
    const auto tasks = parse_task_list(*tasks_csv);

    std::vector<RetrievalRecord> records;
    for (const std::string& user : split.train) {
      for (TaskId task : tasks) {
        const FeatureSeries* s = find_series(series, user, task);
        if (s == nullptr) continue;
        const FeatureSeries z = normalize(*s, stats);
        const int duration = int(z.seconds.size());
        for (int end = T - 1; end < duration; end += T) {
          std::array<int, 3> counts{};
          const Level* end_level = nullptr;
          for (int sec = end - T + 1; sec <= end; ++sec) {
            const auto it = labels.find({user, int(task), sec});
            if (it == labels.end()) continue;
            ++counts[int(it->second)];
            if (sec == end) end_level = &it->second;
          }
          if (counts[0] + counts[1] + counts[2] == 0) continue;
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
          Level label = Level(best);
          if (!unique && end_level != nullptr) label = *end_level;

          RetrievalRecord rec;
          rec.user_id = user;
          rec.task = task;
          rec.window_id = end;
          const auto p = profiles.find(user);
          rec.profile = p != profiles.end() ? p->second.profile_name : "population";
          rec.label = label;
          rec.table = build_table(z, end, T);
          rec.descriptor = descriptor(rec.table);
          records.push_back(std::move(rec));
        }
      }
    }
    const RetrievalDb db = RetrievalDb::build(std::move(records), train);
    atomic_write_file(*out, db_to_jsonl(db));
    std::cout << "indexed " << db.records().size() << " windows -> " << *out << "\n";
  });
}

// -------------------------------------------------------------- retrieve ----

void add_retrieve(CLI::App& app, Ctx& ctx) {
  auto db_path = std::make_shared<std::string>();
  auto features_path = std::make_shared<std::string>();
  auto stats_path = std::make_shared<std::string>();
  auto user = std::make_shared<std::string>();
  auto task_name = std::make_shared<std::string>("reading");
  auto end_second = std::make_shared<int>(4);
  auto k = std::make_shared<int>(3);
  auto profile = std::make_shared<std::string>();
  auto profiles_path = std::make_shared<std::string>();
  auto exclude_same = std::make_shared<bool>(false);
  auto flat_cos = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  CLI::App* sub = app.add_subcommand("retrieve", "Query the retrieval database");
  sub->add_option("--db", *db_path, "db.jsonl")->required();
  sub->add_option("--features", *features_path, "features.csv")->required();
  sub->add_option("--stats", *stats_path, "stats.json")->required();
  sub->add_option("--user", *user, "Query user")->required();
  sub->add_option("--task", *task_name, "Query task")->capture_default_str();
  sub->add_option("--end", *end_second, "Window end second")->capture_default_str();
  CLI::Option* k_opt = sub->add_option("--k", *k, "Neighbors")->capture_default_str();
  sub->add_option("--profile", *profile, "Profile filter (empty matches any)");
  sub->add_option("--profiles", *profiles_path, "profiles.jsonl to look up the user");
  sub->add_flag("--exclude-same-user", *exclude_same, "Skip the query user's records");
  sub->add_flag("--flat-cosine", *flat_cos, "Flattened-cosine distance baseline");
  sub->add_option("--out", *out, "Output csv (default stdout)");
  sub->callback([&ctx, db_path, features_path, stats_path, user, task_name, end_second, k,
                 k_opt, profile, profiles_path, exclude_same, flat_cos, out] {
    RunConfig rc = ctx.base();
    override_if(k_opt, rc.k, *k);

    const RetrievalDb db = db_from_jsonl(read_file(*db_path));
    const auto series = load_features(*features_path);
    const PopulationStats stats = stats_from_json(read_file(*stats_path));
    const TaskId task = parse_task(*task_name);
    const FeatureSeries z = normalize(require_series(series, *user, task), stats);
    const FeatureTable table = build_table(z, *end_second, db.window());

    std::string query_profile = *profile;
    if (query_profile.empty() && !profiles_path->empty()) {
      const auto profiles = profile_map(*profiles_path);
      const auto it = profiles.find(*user);
      if (it != profiles.end()) query_profile = it->second.profile_name;
    }

    RetrieveOptions opt;
    opt.k = rc.k;
    opt.exclude_same_user = *exclude_same;
    opt.flattened_cosine = *flat_cos;
    const RetrievalResult result = retrieve(db, table, query_profile, opt);
    if (result.fallback_task_only) {
      std::cerr << "note: no (task, profile) match; widened to task-only candidates\n";
    }

    std::string csv = "rank,user,task,window_id,label,distance\n";
    for (std::size_t i = 0; i < result.hits.size(); ++i) {
      const RetrievalRecord& rec = db.records()[std::size_t(result.hits[i].record_id)];
      csv += std::to_string(i + 1) + "," + rec.user_id + "," + to_string(rec.task) + "," +
             std::to_string(rec.window_id) + "," + to_string(rec.label) + "," +
             format_fixed(result.hits[i].distance, 6) + "\n";
    }
    if (out->empty()) {
      std::cout << csv;
    } else {
      atomic_write_file(*out, csv);
      std::cout << "wrote " << result.hits.size() << " hits -> " << *out << "\n";
    }
  });
}

// --------------------------------------------------------------- predict ----

void add_predict(CLI::App& app, Ctx& ctx) {
  auto features_path = std::make_shared<std::string>();
  auto stats_path = std::make_shared<std::string>();
  auto rules_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto profiles_path = std::make_shared<std::string>();
  auto db_path = std::make_shared<std::string>();
  auto tasks_csv = std::make_shared<std::string>("reading,gaming");
  auto window = std::make_shared<int>(5);
  auto k = std::make_shared<int>(3);
  auto backend = std::make_shared<std::string>("mock");
  auto exclude_same = std::make_shared<bool>(false);
  auto flat_cos = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>("predictions.jsonl");
  CLI::App* sub = app.add_subcommand("predict", "Run windowed load inference");
  sub->add_option("--features", *features_path, "features.csv")->required();
  sub->add_option("--stats", *stats_path, "stats.json")->required();
  sub->add_option("--rules", *rules_path, "rules.jsonl")->required();
  sub->add_option("--split", *split_path, "Split manifest (predicts the test side)")
      ->required();
  sub->add_option("--profiles", *profiles_path, "profiles.jsonl (optional)");
  sub->add_option("--db", *db_path, "db.jsonl (optional)");
  sub->add_option("--tasks", *tasks_csv, "Tasks to predict")->capture_default_str();
  CLI::Option* window_opt =
      sub->add_option("--window", *window, "Window length")->capture_default_str();
  CLI::Option* k_opt = sub->add_option("--k", *k, "References per window")
                           ->capture_default_str();
  CLI::Option* backend_opt =
      sub->add_option("--backend", *backend, "mock | remote")->capture_default_str();
  sub->add_flag("--exclude-same-user", *exclude_same, "Skip same-user references");
  sub->add_flag("--flat-cosine", *flat_cos, "Flattened-cosine retrieval baseline");
  sub->add_option("--out", *out, "Output predictions.jsonl")->capture_default_str();
  sub->callback([&ctx, features_path, stats_path, rules_path, split_path, profiles_path,
                 db_path, tasks_csv, window, window_opt, k, k_opt, backend, backend_opt,
                 out, exclude_same, flat_cos] {
    RunConfig rc = ctx.base();
    override_if(window_opt, rc.window, *window);
    override_if(k_opt, rc.k, *k);
    override_if(backend_opt, rc.backend, *backend);
    const auto client = make_client(rc);

    const auto series = load_features(*features_path);
    const PopulationStats stats = stats_from_json(read_file(*stats_path));
    const RuleStore rules = rules_from_jsonl(read_file(*rules_path));
    const SplitManifest split = split_from_text(read_file(*split_path));
    const auto profiles = profile_map(*profiles_path);

    std::optional<RetrievalDb> db;
    if (!db_path->empty()) db = db_from_jsonl(read_file(*db_path));

    std::vector<PredictionLogEntry> log;
    const std::string backend_name = client ? client->name() : "mock";
    for (const std::string& user : split.test) {
      for (TaskId task : parse_task_list(*tasks_csv)) {
        const FeatureSeries z = normalize(require_series(series, user, task), stats);
        const GuidanceRule rule = select_rule(rules, task);

        SessionContext sc;
        sc.rule = &rule;
        const auto p = profiles.find(user);
        sc.profile = p != profiles.end() ? &p->second : nullptr;
        sc.db = db ? &*db : nullptr;
        sc.client = client.get();
        sc.window = rc.window;
        sc.k = rc.k;
        sc.exclude_same_user = *exclude_same;
        sc.flattened_cosine = *flat_cos;

        const SessionResult session = run_session(z, sc);
        for (const WindowPrediction& wp : session.windows) {
          PredictionLogEntry e;
          e.user = user;
          e.task = task;
          e.window_end = wp.end_second;
          e.label = wp.label;
          e.reasoning = wp.reasoning;
          e.latency_seconds = wp.latency_seconds;
          e.backend = wp.carried ? "carried" : backend_name;
          e.carried = wp.carried;
          e.parse_failed = wp.parse_failed;
          log.push_back(std::move(e));
        }
      }
    }
    atomic_write_file(*out, predictions_to_jsonl(log));
    std::cout << "predicted " << log.size() << " windows -> " << *out << "\n";
  });
}

// -------------------------------------------------------------- evaluate ----

void add_evaluate(CLI::App& app) {
  auto pred_path = std::make_shared<std::string>();
  auto labels_path = std::make_shared<std::string>();
  auto out_dir = std::make_shared<std::string>("eval");
  CLI::App* sub = app.add_subcommand("evaluate", "Score predictions against labels");
  sub->add_option("--predictions", *pred_path, "predictions.jsonl")->required();
  sub->add_option("--labels", *labels_path, "labels.csv")->required();
  sub->add_option("--out-dir", *out_dir, "Report directory")->capture_default_str();
  sub->callback([pred_path, labels_path, out_dir] {
    const auto entries = predictions_from_jsonl(read_file(*pred_path));
    if (entries.empty()) throw InputError("prediction log is empty");
    const LabelMap labels = label_map(labels_from_csv_text(read_file(*labels_path)));

    std::map<std::pair<std::string, int>, std::vector<WindowPrediction>> sessions;
    for (const PredictionLogEntry& e : entries) {
      WindowPrediction wp;
      wp.end_second = e.window_end;
      wp.label = e.label;
      wp.carried = e.carried;
      wp.parse_failed = e.parse_failed;
      sessions[{e.user, int(e.task)}].push_back(wp);
    }

    std::vector<EvalPair> pairs;
    for (auto& [key, windows] : sessions) {
      std::sort(windows.begin(), windows.end(),
                [](const WindowPrediction& a, const WindowPrediction& b) {
                  return a.end_second < b.end_second;
                });
      for (const SecondPrediction& sp : expand_to_seconds(windows)) {
        const auto it = labels.find({key.first, key.second, sp.second});
        if (it == labels.end()) continue;
        EvalPair pair;
        pair.user = key.first;
        pair.truth = it->second;
        pair.pred = sp.label;
        pair.parse_failed = sp.parse_failed;
        pairs.push_back(std::move(pair));
      }
    }
    if (pairs.empty()) throw InputError("no prediction seconds matched the labels");

    const MetricReport report = compute_metrics(confusion(pairs));
    const auto users = per_user_accuracy(pairs);
    const fs::path dir(*out_dir);
    atomic_write_file((dir / "metrics.csv").string(), metric_report_to_csv(report));
    atomic_write_file((dir / "per_user.csv").string(), per_user_to_csv(users));
    atomic_write_file((dir / "accuracy_cdf.csv").string(), accuracy_cdf_csv(users));
    const std::string summary = metric_report_summary(report);
    atomic_write_file((dir / "summary.txt").string(), summary);
    std::cout << summary;
  });
}

// --------------------------------------------------------------- perturb ----

void add_perturb(CLI::App& app, Ctx& ctx) {
  auto features_path = std::make_shared<std::string>();
  auto stats_path = std::make_shared<std::string>();
  auto rules_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto db_path = std::make_shared<std::string>();
  auto task_name = std::make_shared<std::string>("reading");
  auto samples = std::make_shared<int>(100);
  auto top = std::make_shared<int>(3);
  auto window = std::make_shared<int>(5);
  auto k = std::make_shared<int>(0);
  auto out = std::make_shared<std::string>("counterfactual.csv");
  CLI::App* sub =
      app.add_subcommand("perturb", "Counterfactual feature-perturbation harness");
  sub->add_option("--features", *features_path, "features.csv")->required();
  sub->add_option("--stats", *stats_path, "stats.json")->required();
  sub->add_option("--rules", *rules_path, "rules.jsonl")->required();
  sub->add_option("--split", *split_path, "Split manifest (samples the test side)")
      ->required();
  sub->add_option("--db", *db_path, "db.jsonl (optional)");
  sub->add_option("--task", *task_name, "Task to perturb")->capture_default_str();
  sub->add_option("--samples", *samples, "Windows to sample")->capture_default_str();
  sub->add_option("--top", *top, "Leading rule features to perturb")
      ->capture_default_str();
  CLI::Option* window_opt =
      sub->add_option("--window", *window, "Window length")->capture_default_str();
  CLI::Option* k_opt =
      sub->add_option("--k", *k, "References per window")->capture_default_str();
  sub->add_option("--out", *out, "Output report csv")->capture_default_str();
  sub->callback([&ctx, features_path, stats_path, rules_path, split_path, db_path,
                 task_name, samples, top, window, window_opt, k, k_opt, out] {
    RunConfig rc = ctx.base();
    override_if(window_opt, rc.window, *window);
    rc.k = *k;
    override_if(k_opt, rc.k, *k);

    const auto series = load_features(*features_path);
    const PopulationStats stats = stats_from_json(read_file(*stats_path));
    const RuleStore rules = rules_from_jsonl(read_file(*rules_path));
    const SplitManifest split = split_from_text(read_file(*split_path));
    const TaskId task = parse_task(*task_name);
    const GuidanceRule rule = select_rule(rules, task);

    std::optional<RetrievalDb> db;
    if (!db_path->empty()) db = db_from_jsonl(read_file(*db_path));

    std::vector<FeatureTable> tables;
    for (const std::string& user : split.test) {
      const FeatureSeries* s = find_series(series, user, task);
      if (s == nullptr) continue;
      const FeatureSeries z = normalize(*s, stats);
      const int duration = int(z.seconds.size());
      for (int end = rc.window - 1; end < duration; end += rc.window) {
        tables.push_back(build_table(z, end, rc.window));
      }
    }
    if (tables.empty()) throw InputError("no sample windows for " + *task_name);
    Rng rng(rc.seed);
    rng.shuffle(tables);
    if (int(tables.size()) > *samples) tables.resize(std::size_t(*samples));

    SessionContext sc;
    sc.rule = &rule;
    sc.db = db ? &*db : nullptr;
    sc.window = rc.window;
    sc.k = rc.k;

    CounterfactualConfig cc;
    cc.top_features = *top;
    const auto rows = counterfactual_run(tables, sc, cc);
    atomic_write_file(*out, counterfactual_to_csv(rows));
    std::cout << "perturbed " << rows.size() << " features over " << tables.size()
              << " windows -> " << *out << "\n";
  });
}

// ---------------------------------------------------------------- ablate ----

void add_ablate(CLI::App& app, Ctx& ctx) {
  auto raw_dir = std::make_shared<std::string>();
  auto labels_path = std::make_shared<std::string>();
  auto split_path = std::make_shared<std::string>();
  auto windows_csv = std::make_shared<std::string>("3,5,10,20");
  auto toggle_window = std::make_shared<int>(5);
  auto no_toggles = std::make_shared<bool>(false);
  auto label_noise = std::make_shared<double>(0.0);
  auto missing_ratio = std::make_shared<double>(0.0);
  auto k = std::make_shared<int>(3);
  auto out = std::make_shared<std::string>("ablation.csv");
  CLI::App* sub = app.add_subcommand("ablate", "Window/module ablation grid");
  sub->add_option("--raw", *raw_dir, "Raw recordings directory")->required();
  sub->add_option("--labels", *labels_path, "labels.csv")->required();
  sub->add_option("--split", *split_path, "Split manifest")->required();
  sub->add_option("--windows", *windows_csv, "Window lengths")->capture_default_str();
  sub->add_option("--toggle-window", *toggle_window, "Window for module toggles")
      ->capture_default_str();
  sub->add_flag("--no-toggles", *no_toggles, "Skip module on/off cells");
  sub->add_option("--label-noise", *label_noise, "Train-label flip rate")
      ->capture_default_str();
  sub->add_option("--missing-ratio", *missing_ratio, "Test-sample drop ratio")
      ->capture_default_str();
  CLI::Option* k_opt =
      sub->add_option("--k", *k, "References per window")->capture_default_str();
  sub->add_option("--out", *out, "Output csv")->capture_default_str();
  sub->callback([&ctx, raw_dir, labels_path, split_path, windows_csv, toggle_window,
                 no_toggles, label_noise, missing_ratio, k, k_opt, out] {
    RunConfig rc = ctx.base();
    override_if(k_opt, rc.k, *k);

    const Dataset data = load_dataset(*raw_dir, *labels_path, *split_path);
    PipelineConfig base;
    base.k = rc.k;
    base.profile_seed = rc.profile_seed;
    base.label_noise = *label_noise;
    base.missing_ratio = *missing_ratio;
    base.perturb_seed = mix_seed(rc.seed, 0x9a);

    AblationGrid grid;
    grid.windows = parse_int_list(*windows_csv);
    grid.module_toggles = !*no_toggles;
    grid.toggle_window = *toggle_window;

    const auto cells = run_ablations(data, base, grid);
    atomic_write_file(*out, ablation_to_csv(cells));
    for (const AblationCell& c : cells) {
      std::cout << "T=" << c.window << " rules=" << (c.rules ? "on" : "off")
                << " profiles=" << (c.profiles ? "on" : "off")
                << " retrieval=" << (c.retrieval ? "on" : "off") << ": ";
      if (c.ok) {
        std::cout << "accuracy " << format_fixed(c.accuracy, 4) << ", macro F1 "
                  << format_fixed(c.macro_f1, 4) << " ("
                  << format_fixed(c.wall_seconds, 2) << "s)\n";
      } else {
        std::cout << "failed: " << c.error << "\n";
      }
    }
    std::cout << "wrote " << cells.size() << " cells -> " << *out << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive-load estimation from gaze: synthesize, featurize, profile, "
               "retrieve, predict, evaluate."};
  app.require_subcommand(1);
  app.fallthrough();

  Ctx ctx;
  app.add_option("--config", ctx.config_path, "Key=value configuration file")
      ->envname("GAZELOAD_CONFIG");
  ctx.seed_opt = app.add_option("--seed", ctx.seed_flag, "Global RNG seed");

  add_synth(app, ctx);
  add_split(app, ctx);
  add_interpolate(app);
  add_inject_noise(app, ctx);
  add_inject_missing(app, ctx);
  add_featurize(app, ctx);
  add_stats(app);
  add_gen_rules(app, ctx);
  add_profile_fit(app, ctx);
  add_profile_assign(app);
  add_build_db(app, ctx);
  add_retrieve(app, ctx);
  add_predict(app, ctx);
  add_evaluate(app);
  add_perturb(app, ctx);
  add_ablate(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const gazeload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
