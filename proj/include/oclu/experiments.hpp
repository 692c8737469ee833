#pragma once

// Experiment recipes, baseline benchmarking and report files.
//
// An experiment directory holds
//
//   config.json   echo of the full ExperimentConfig
//   report.csv    method,mean,std
//   records.csv   per-stimulus accuracies of every reported method
//   loss.csv      epoch,loss (when a model was trained)
//   curve.csv     setting,mean,std (training-size and noise sweeps)
//   model.ckpt    trained network (when a model was trained)

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oclu/baselines.hpp"
#include "oclu/dataset_io.hpp"
#include "oclu/evaluation.hpp"
#include "oclu/trainer.hpp"
#include "oclu/unet.hpp"

namespace oclu {

enum class Profile { Desk, Paper };

std::string_view to_string(Profile p);
Profile parse_profile(std::string_view name);

// Parameter values swept per baseline; the best mean accuracy is reported.
struct BaselineGrid {
  int kmeans_restarts = 10;
  FuzzyCMeansParams fcm;
  // NJW and normalized cut: sigma = factor * median pairwise distance.
  std::vector<double> sigma_factors{0.02, 0.05, 0.1, 0.15, 0.25, 0.5};
  // Mean shift: bandwidth = factor * image size.
  std::vector<double> bandwidth_factors{0.03, 0.05, 0.1, 0.15, 0.2, 0.3};
  // CFSFDP: cutoff distance as a pairwise-distance quantile.
  std::vector<double> cfsfdp_percentiles{0.005, 0.01, 0.02, 0.05, 0.1};
};

using ParamSetting = std::map<std::string, double>;

// Every parameter setting tried for a method, in sweep order.
std::vector<ParamSetting> grid_settings(Method method, const BaselineGrid& grid, int image_size);

// Baselines see genuine points followed by noise pixel centers; only the
// genuine points' labels are returned. The CNN reads the raster. CNN and
// mean shift never receive the cluster count.
ClusteringResult run_method(Method method, const Stimulus& stimulus, const ParamSetting& setting,
                            Rng& rng, const UNetModel* model = nullptr);

struct MethodRow {
  Method method = Method::KMeans;
  Summary summary;
  ParamSetting best;
};

struct BenchOptions {
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  BaselineGrid grid;
  const UNetModel* model = nullptr;
  std::uint64_t seed = 0;
};

struct BenchResult {
  std::vector<MethodRow> rows;      // in table column order
  std::vector<EvalRecord> records;  // the winning setting of each method
};

// Sweeps each method's grid over the whole test set and keeps the setting
// with the best mean accuracy (first one on ties). Stimulus i of method m
// draws from derive_seed(seed, name(m), i) under every setting.
BenchResult bench(const std::vector<Stimulus>& test, const BenchOptions& options);

struct ExperimentConfig {
  int id = 1;
  Profile profile = Profile::Desk;
  std::string description;
  SceneSpec train_spec;
  SceneSpec test_spec;
  int train_size = 0;  // 0: no model is trained
  int test_size = 200;
  UNetConfig model;
  TrainConfig train;
  BaselineGrid grid;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  // Experiments whose checkpoints are evaluated instead of training.
  std::vector<int> prerequisites;
  // Training-size sweep; each model trains for at least `min_updates`
  // optimizer steps.
  std::vector<int> sweep_sizes;
  int min_updates = 0;
  std::vector<int> noise_levels;
  std::uint64_t master_seed = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t test_seed = 0;

  nlohmann::json to_json() const;
};

// Recipe for experiments 1-9. The desk profile uses 64 x 64 images, four
// levels and a fifth of the training data for experiments 4-6 and 8.
ExperimentConfig make_experiment(int id, Profile profile, std::uint64_t master_seed);

struct CurvePoint {
  std::string setting;
  Summary summary;
};

struct Report {
  nlohmann::json config;
  std::vector<MethodRow> rows;
  std::vector<EvalRecord> records;
  std::vector<double> loss_history;
  std::vector<CurvePoint> curve;
  double wall_seconds = 0.0;
};

// Runtimes are zeroed in deterministic mode so reruns are byte-identical.
void write_report(const std::filesystem::path& dir, const Report& report, bool deterministic);
void write_summary_csv(std::ostream& os, const std::vector<MethodRow>& rows);

std::filesystem::path experiment_dir(const std::filesystem::path& root, int id);
std::filesystem::path checkpoint_path(const std::filesystem::path& root, int id);

// Runs one recipe under `root`, writing into experiment_dir(root, id).
// Experiments 2, 7 and 9 read the checkpoints of their prerequisites and
// throw std::runtime_error if one is missing. With `reuse_model`, a
// checkpoint left there by a run of the identical config is loaded instead
// of training again.
Report run_experiment(const ExperimentConfig& config, const std::filesystem::path& root,
                      bool deterministic, std::ostream* log = nullptr, bool reuse_model = false);

// ------------------------------------------------------- CLI operations

void cmd_gen(const SceneSpec& spec, int count, const std::filesystem::path& out,
             std::uint64_t seed);

// Trains on a stored dataset; writes the checkpoint and `<checkpoint>.loss.csv`.
// Throws naming the stimulus whose cluster count exceeds the output channels.
TrainResult cmd_train(const std::filesystem::path& dataset, const UNetConfig& model_config,
                      const TrainConfig& train_config, const std::filesystem::path& checkpoint,
                      std::ostream* log = nullptr);

// Benchmarks a stored dataset; `checkpoint` is required iff CNN is listed.
Report cmd_bench(const std::filesystem::path& dataset, const std::vector<Method>& methods,
                 const BaselineGrid& grid, const std::optional<std::filesystem::path>& checkpoint,
                 std::uint64_t seed);

void write_loss_csv(std::ostream& os, const std::vector<double>& losses);

}  // namespace oclu
