// Command-line front end: dataset generation, training, benchmarking,
// experiment recipes, rendering and gradient checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oclu/dataset_io.hpp"
#include "oclu/experiments.hpp"
#include "oclu/gradcheck.hpp"
#include "oclu/render.hpp"

namespace fs = std::filesystem;
using namespace oclu;

namespace {

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

void print_rows(const std::vector<MethodRow>& rows) { write_summary_csv(std::cout, rows); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering workbench: synthetic stimuli, a U-Net clusterer and classical baselines"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out;
  std::string profile_name = "desk";
  bool deterministic = false;
  auto common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    auto* o = cmd->add_option("--out", out, "output path");
    if (needs_out) o->required();
    cmd->add_option("--profile", profile_name, "desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
    cmd->add_flag("--deterministic", deterministic,
                  "fixed reduction order and zeroed runtimes in reports");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "generate a dataset");
  common(gen, true);
  std::string spec_file;
  int gen_experiment = 0;
  std::string split = "train";
  int count = -1;
  gen->add_option("--spec", spec_file, "scene spec JSON file");
  gen->add_option("--experiment", gen_experiment, "take the scene spec of experiment 1-9");
  gen->add_option("--split", split, "train or test (with --experiment)")
      ->check(CLI::IsMember({"train", "test"}));
  gen->add_option("--count", count, "number of stimuli (default: the recipe's split size)");

  // train
  auto* tr = app.add_subcommand("train", "train the network on a dataset");
  common(tr, true);
  std::string data_dir;
  TrainConfig tc;
  int depth = 0, filters = 16, channels = 3;
  tr->add_option("--data", data_dir, "dataset directory")->required();
  tr->add_option("--epochs", tc.epochs)->capture_default_str();
  tr->add_option("--batch", tc.batch_size)->capture_default_str();
  tr->add_option("--lr", tc.learning_rate)->capture_default_str();
  tr->add_option("--depth", depth, "levels (default: from the profile)");
  tr->add_option("--filters", filters)->capture_default_str();
  tr->add_option("--channels", channels, "output channels = max clusters")->capture_default_str();
  tr->add_flag("--early-stop", tc.early_stop);

  // bench
  auto* be = app.add_subcommand("bench", "benchmark methods on a dataset");
  common(be, true);
  std::vector<std::string> method_names{"CNN", "kM", "FCM", "NJW", "SC", "MS", "CFSFDP"};
  std::string checkpoint;
  BaselineGrid grid;
  be->add_option("--data", data_dir, "dataset directory")->required();
  be->add_option("--methods", method_names, "subset of CNN kM FCM NJW SC MS CFSFDP")
      ->delimiter(',');
  be->add_option("--checkpoint", checkpoint, "network checkpoint (needed for CNN)");
  be->add_option("--sigma-factors", grid.sigma_factors)->delimiter(',');
  be->add_option("--bandwidth-factors", grid.bandwidth_factors)->delimiter(',');
  be->add_option("--cfsfdp-percentiles", grid.cfsfdp_percentiles)->delimiter(',');
  be->add_option("--kmeans-restarts", grid.kmeans_restarts)->capture_default_str();

  // experiment
  auto* ex = app.add_subcommand("experiment", "run an experiment recipe");
  common(ex, true);
  int exp_id = 1;
  std::optional<int> train_size, test_size, epochs;
  std::string label_order;
  std::vector<std::string> exp_methods;
  ex->add_option("id", exp_id, "experiment 1-9")->required()->check(CLI::Range(1, 9));
  ex->add_option("--train-size", train_size);
  ex->add_option("--test-size", test_size);
  ex->add_option("--epochs", epochs);
  ex->add_option("--label-order", label_order, "topdown or random training labels")
      ->check(CLI::IsMember({"topdown", "random"}));
  ex->add_option("--methods", exp_methods)->delimiter(',');
  bool reuse = false;
  ex->add_flag("--reuse", reuse, "load the checkpoint of an identical earlier run instead of training");

  // render
  auto* re = app.add_subcommand("render", "write PGM views of a stimulus and predictions");
  common(re, true);
  int index = 0;
  std::vector<std::string> render_methods;
  re->add_option("--data", data_dir, "dataset directory")->required();
  re->add_option("--index", index, "stimulus index")->capture_default_str();
  re->add_option("--checkpoint", checkpoint, "network checkpoint (needed for CNN)");
  re->add_option("--methods", render_methods)->delimiter(',');

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the autodiff operators");
  common(gc, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const Profile profile = parse_profile(profile_name);
    if (*gen) {
      SceneSpec spec;
      int n = count;
      if (!spec_file.empty()) {
        spec = scene_spec_from_json(read_json(spec_file));
        if (n < 0) throw std::invalid_argument("--count is required with --spec");
      } else if (gen_experiment > 0) {
        const auto c = make_experiment(gen_experiment, profile, seed);
        spec = split == "train" ? c.train_spec : c.test_spec;
        if (n < 0) n = split == "train" ? c.train_size : c.test_size;
      } else {
        throw std::invalid_argument("gen needs --spec or --experiment");
      }
      cmd_gen(spec, n, out, seed);
      std::cout << "wrote " << n << " stimuli to " << out << '\n';
    } else if (*tr) {
      const auto ds = load_dataset(data_dir);
      UNetConfig mc = profile == Profile::Desk ? UNetConfig::desk() : UNetConfig::paper();
      if (depth > 0) mc.depth = depth;
      mc.base_filters = filters;
      mc.output_channels = channels;
      mc.image_size = scene_image_size(ds.spec);
      tc.seed = seed;
      tc.deterministic = deterministic;
      const auto r = cmd_train(data_dir, mc, tc, out, &std::cout);
      std::cout << "trained " << r.epochs_run << " epochs, checkpoint " << out << '\n';
    } else if (*be) {
      std::optional<fs::path> ck;
      if (!checkpoint.empty()) ck = checkpoint;
      const auto report = cmd_bench(data_dir, parse_methods(method_names), grid, ck, seed);
      write_report(out, report, deterministic);
      print_rows(report.rows);
    } else if (*ex) {
      auto c = make_experiment(exp_id, profile, seed);
      if (train_size) c.train_size = *train_size;
      if (test_size) c.test_size = *test_size;
      if (epochs) c.train.epochs = *epochs;
      if (!exp_methods.empty()) c.methods = parse_methods(exp_methods);
      if (!label_order.empty()) {
        std::visit([&](auto& s) { s.label_order = parse_label_order(label_order); }, c.train_spec);
      }
      const auto report = run_experiment(c, out, deterministic, &std::cerr, reuse);
      print_rows(report.rows);
      for (const auto& p : report.curve) {
        std::printf("%s,%.6f,%.6f\n", p.setting.c_str(), p.summary.mean, p.summary.stddev);
      }
    } else if (*re) {
      const auto ds = load_dataset(data_dir);
      if (index < 0 || static_cast<std::size_t>(index) >= ds.stimuli.size()) {
        throw std::invalid_argument("--index out of range");
      }
      const auto& s = ds.stimuli[static_cast<std::size_t>(index)];
      std::optional<UNetModel> model;
      if (!checkpoint.empty()) model = load_checkpoint(checkpoint);
      std::vector<ClusteringResult> results;
      const BaselineGrid defaults;
      for (auto m : parse_methods(render_methods)) {
        if (m == Method::CNN && !model) throw std::invalid_argument("render: CNN needs --checkpoint");
        // The middle grid value of each method stands in for its default.
        const auto settings = grid_settings(m, defaults, s.image_size());
        Rng rng = make_rng(seed, method_name(m), static_cast<std::uint64_t>(index));
        results.push_back(run_method(m, s, settings[settings.size() / 2], rng, model ? &*model : nullptr));
      }
      render_stimulus(out, stimulus_stem(static_cast<std::size_t>(index)), s, results);
      std::cout << "wrote renders to " << out << '\n';
    } else if (*gc) {
      bool ok = true;
      for (const auto& c : gradient_check_suite(seed)) {
        std::printf("%-30s max rel error %.3e  %s\n", c.name.c_str(), c.report.worst,
                    c.report.passed ? "ok" : "FAILED");
        ok = ok && c.report.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
