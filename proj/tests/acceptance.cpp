// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--criteria 1,2,...] [--cache-dir DIR] [--seed N] [--cli PATH]
//
// Criteria 4-8 train desk-scale networks through run_experiment. With
// --cache-dir the experiment directories are kept there and checkpoints of
// identical recipes are reused on the next run; otherwise they live in a
// temporary directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oclu/autodiff.hpp"
#include "oclu/baselines.hpp"
#include "oclu/dataset_io.hpp"
#include "oclu/evaluation.hpp"
#include "oclu/experiments.hpp"
#include "oclu/gradcheck.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "tempdir.hpp"

using namespace oclu;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double mean_of(const std::vector<MethodRow>& rows, Method m) {
  for (const auto& r : rows) {
    if (r.method == m) return r.summary.mean;
  }
  throw std::runtime_error("no row for " + std::string(method_name(m)));
}

// Best-of-grid mean over every non-CNN row.
std::pair<Method, double> best_baseline(const std::vector<MethodRow>& rows) {
  std::pair<Method, double> best{Method::KMeans, -1.0};
  for (const auto& r : rows) {
    if (r.method != Method::CNN && r.summary.mean > best.second) best = {r.method, r.summary.mean};
  }
  if (best.second < 0) throw std::runtime_error("no baseline rows");
  return best;
}

// ------------------------------------------------------------ criteria

Outcome gradient_correctness() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0;
  std::string worst_name;
  int checks = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const auto& c : gradient_check_suite(seed, 1e-5, 1e-4)) {
      ++checks;
      if (c.report.worst >= worst) worst = c.report.worst, worst_name = c.name;
    }
  }
  const double t = seconds_since(start);
  return {worst < 1e-4 && t < 120,
          std::to_string(checks) + " checks, worst relative error " + fmt("%.2e", worst) + " (" +
              worst_name + ") < 1e-4, " + fmt("%.2f", t) + " s < 120 s"};
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(derive_seed(2, "oracles"));
  int tensor_mismatch = 0, tensor_cases = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t C = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const std::size_t H = 2 * static_cast<std::size_t>(uniform_int(rng, 1, 6));
    const std::size_t W = 2 * static_cast<std::size_t>(uniform_int(rng, 1, 6));
    const std::size_t F = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const std::size_t k = 2 * static_cast<std::size_t>(uniform_int(rng, 0, 2)) + 1;
    const auto x = testing::int_tensor({C, H, W}, rng);
    const auto w = testing::int_tensor({F, C, k, k}, rng);
    const auto b = testing::int_tensor({F}, rng);
    ad::Tape<double> tape;
    const auto vx = tape.constant(x);
    const auto conv = ad::conv2d(tape, vx, tape.constant(w), tape.constant(b));
    const auto pool = ad::max_pool2x2(tape, vx);
    const auto up = ad::upsample_nearest2x(tape, vx);
    auto same = [](const ad::Tensor<double>& a, const ad::Tensor<double>& e) {
      return a.shape() == e.shape() && std::equal(a.values().begin(), a.values().end(), e.values().begin());
    };
    tensor_mismatch += !same(tape.value(conv), testing::naive_conv(x, w, b));
    tensor_mismatch += !same(tape.value(pool), testing::naive_pool(x));
    tensor_mismatch += !same(tape.value(up), testing::naive_upsample(x));
    tensor_cases += 3;
  }

  double rand_err = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 50));
    const auto a = testing::random_partition(rng, n, static_cast<int>(uniform_int(rng, 1, 6)));
    const auto b = testing::random_partition(rng, n, static_cast<int>(uniform_int(rng, 1, 6)));
    rand_err = std::max(rand_err, std::abs(pairwise_rand_accuracy(a, b) - testing::rand_by_pairs(a, b)));
  }

  double peak_err = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto pts = testing::random_points(rng, 30);
    const double dc = CfsfdpParams{}.resolve_cutoff(pts);
    const auto fast = density_peaks(pts, dc);
    const auto slow = testing::naive_peaks(pts, dc);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      peak_err = std::max({peak_err, std::abs(fast.rho[i] - slow.rho[i]), std::abs(fast.delta[i] - slow.delta[i])});
    }
  }
  const double t = seconds_since(start);
  return {tensor_mismatch == 0 && rand_err <= 1e-12 && peak_err <= 1e-12 && t < 60,
          std::to_string(tensor_cases - tensor_mismatch) + "/" + std::to_string(tensor_cases) +
              " conv/pool/upsample exact, Rand error " + fmt("%.1e", rand_err) + ", rho/delta error " +
              fmt("%.1e", peak_err) + " (<= 1e-12), " + fmt("%.2f", t) + " s < 60 s"};
}

Outcome baseline_sanity(std::uint64_t seed) {
  GaussianSceneSpec spec;
  spec.cluster_counts = {2};
  spec.image_size = 128;
  spec.mean_range = {20, 100};
  spec.min_mean_separation = 40;
  spec.covariance_scale = 4;
  spec.points = {100, 400};
  const auto data = generate_dataset(spec, 100, derive_seed(seed, "baseline-sanity"));
  std::vector<double> acc;
  for (std::size_t i = 0; i < data.stimuli.size(); ++i) {
    const auto& s = data.stimuli[i];
    Rng rng = make_rng(seed, "kM", i);
    acc.push_back(pairwise_rand_accuracy(s.point_set.labels, kmeans(s.point_set.points, 2, 10, rng).result.labels));
  }
  const auto sum = summarize(acc);
  return {sum.mean >= 0.95, "k-means mean accuracy " + fmt("%.4f", sum.mean) + " >= 0.95 on 100 stimuli"};
}

// Trained criteria share their networks through the experiment directories.
class Lab {
 public:
  Lab(fs::path root, std::uint64_t seed) : root_(std::move(root)), seed_(seed) {}

  const Report& exp1() { return run(exp1_, make_experiment(1, Profile::Desk, seed_), root_); }

  const Report& exp3_on_own_test() {
    auto c = make_experiment(3, Profile::Desk, seed_);
    c.test_size = 50;
    return run(exp3_, c, root_);
  }

  const Report& exp7() {
    exp3_on_own_test();
    return run(exp7_, make_experiment(7, Profile::Desk, seed_), root_);
  }

  const Report& noise_sweep() {
    exp1();
    auto c = make_experiment(9, Profile::Desk, seed_);
    c.prerequisites = {1};
    return run(noise_, c, root_);
  }

  const Report& random_labels() {
    auto c = make_experiment(1, Profile::Desk, seed_);
    std::visit([](auto& s) { s.label_order = LabelOrder::Random; }, c.train_spec);
    c.methods = {Method::CNN};
    return run(random_, c, root_ / "random-labels");
  }

  const Report& few_samples() {
    auto c = make_experiment(8, Profile::Desk, seed_);
    c.sweep_sizes = {100};
    return run(few_, c, root_ / "few-samples");
  }

 private:
  const Report& run(std::optional<Report>& slot, const ExperimentConfig& c, const fs::path& root) {
    if (!slot) {
      std::cerr << "[acceptance] experiment " << c.id << " under " << root << '\n';
      slot = run_experiment(c, root, true, &std::cerr, true);
    }
    return *slot;
  }

  fs::path root_;
  std::uint64_t seed_;
  std::optional<Report> exp1_, exp3_, exp7_, noise_, random_, few_;
};

Outcome few_samples(Lab& lab) {
  const auto& r = lab.few_samples();
  const double untrained = r.curve.at(0).summary.mean, trained = r.curve.at(1).summary.mean;
  return {trained >= 0.68 && untrained <= 0.55 && r.wall_seconds < 45 * 60,
          "100 samples " + fmt("%.4f", trained) + " >= 0.68, untrained " + fmt("%.4f", untrained) +
              " <= 0.55, " + fmt("%.0f", r.wall_seconds) + " s < 2700 s"};
}

Outcome occlusion(Lab& lab) {
  const auto& r = lab.exp3_on_own_test();
  const double cnn = mean_of(r.rows, Method::CNN);
  const auto [m, best] = best_baseline(r.rows);
  return {cnn - best >= 0.05, "CNN " + fmt("%.4f", cnn) + " - best baseline " + std::string(method_name(m)) + " " +
                                  fmt("%.4f", best) + " = " + fmt("%+.4f", cnn - best) + " >= 0.05"};
}

Outcome noise(Lab& lab) {
  const auto& r = lab.noise_sweep();
  std::vector<double> acc;
  for (const auto& p : r.curve) acc.push_back(p.summary.mean);
  if (acc.size() != 4) throw std::runtime_error("expected 4 noise levels, got " + std::to_string(acc.size()));
  bool ok = acc.back() >= 0.60;
  for (std::size_t i = 1; i < acc.size(); ++i) ok = ok && acc[i] <= acc[i - 1] + 0.02;
  return {ok, "accuracy at noise 0/250/500/1000 = " + fmt("%.4f/%.4f/%.4f/%.4f", acc[0], acc[1], acc[2], acc[3]) +
                  ", steps within 0.02, final >= 0.60"};
}

Outcome transfer(Lab& lab) {
  const double own = mean_of(lab.exp1().rows, Method::CNN);
  const auto& r = lab.exp7();
  const double moved = mean_of(r.rows, Method::CNN);
  const auto [m, best] = best_baseline(r.rows);
  return {own - moved <= 0.06 && moved > best,
          "2-object model " + fmt("%.4f", own) + ", 3-object model " + fmt("%.4f", moved) + ", loss " +
              fmt("%.4f", own - moved) + " <= 0.06, best baseline " + std::string(method_name(m)) + " " +
              fmt("%.4f", best)};
}

Outcome random_labels(Lab& lab) {
  const double topdown = mean_of(lab.exp1().rows, Method::CNN);
  const double random = mean_of(lab.random_labels().rows, Method::CNN);
  return {topdown - random >= 0.15 && random > 0.5,
          "top-down " + fmt("%.4f", topdown) + ", random labels " + fmt("%.4f", random) + ", gap " +
              fmt("%.4f", topdown - random) + " >= 0.15, random > 0.5"};
}

std::vector<std::string> report_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const char* f : {"config.json", "report.csv", "records.csv", "loss.csv", "curve.csv", "model.ckpt"}) {
    if (fs::exists(dir / f)) out.push_back(f);
  }
  return out;
}

// Byte comparison of two experiment directories; returns the differing files.
std::vector<std::string> differing(const fs::path& a, const fs::path& b) {
  std::vector<std::string> out;
  const auto fa = report_files(a), fb = report_files(b);
  if (fa != fb) out.push_back("file list");
  for (const auto& f : fa) {
    if (slurp(a / f) != slurp(b / f)) out.push_back(f);
  }
  return out;
}

Outcome determinism(std::uint64_t seed, const std::string& cli) {
  auto c = make_experiment(1, Profile::Desk, seed);
  c.train_size = 32;
  c.test_size = 20;
  c.train.epochs = 2;
  TempDir a, b;
  run_experiment(c, a, true);
  run_experiment(c, b, true);
  auto diff = differing(experiment_dir(a, 1), experiment_dir(b, 1));
  std::string detail = "in-process rerun: " + std::to_string(report_files(experiment_dir(a, 1)).size()) +
                       " files identical";

  if (!cli.empty()) {
    TempDir x, y;
    for (const auto* dir : {&x, &y}) {
      const std::string cmd = "\"" + cli + "\" experiment 1 --profile desk --seed " + std::to_string(seed) +
                              " --train-size 32 --test-size 20 --epochs 2 --deterministic --out \"" +
                              dir->path().string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) throw std::runtime_error("command failed: " + cmd);
    }
    const auto d2 = differing(experiment_dir(x, 1), experiment_dir(y, 1));
    diff.insert(diff.end(), d2.begin(), d2.end());
    detail += "; separate CLI processes: " + std::to_string(report_files(experiment_dir(x, 1)).size()) +
              " files identical";
  }
  if (!diff.empty()) {
    detail = "differing:";
    for (const auto& f : diff) detail += " " + f;
  }
  return {diff.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string cache_dir, cli;
  std::uint64_t seed = 1;
  app.add_option("--criteria", criteria, "criteria to run")->delimiter(',')->check(CLI::Range(1, 9));
  app.add_option("--cache-dir", cache_dir, "keep experiment directories here and reuse checkpoints");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--cli", cli, "oclu executable for the cross-process determinism check");
  CLI11_PARSE(app, argc, argv);

  std::optional<TempDir> scratch;
  fs::path root;
  if (cache_dir.empty()) {
    scratch.emplace();
    root = scratch->path();
  } else {
    root = cache_dir;
    fs::create_directories(root);
  }
  Lab lab(root, seed);

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> table{
      {1, {"gradient correctness", [] { return gradient_correctness(); }}},
      {2, {"oracle equivalence", [] { return oracle_equivalence(); }}},
      {3, {"baseline sanity", [&] { return baseline_sanity(seed); }}},
      {4, {"learning from few samples", [&] { return few_samples(lab); }}},
      {5, {"occlusion differential", [&] { return occlusion(lab); }}},
      {6, {"noise robustness", [&] { return noise(lab); }}},
      {7, {"transfer", [&] { return transfer(lab); }}},
      {8, {"random-label control", [&] { return random_labels(lab); }}},
      {9, {"determinism", [&] { return determinism(seed, cli); }}},
  };

  const std::set<int> wanted(criteria.begin(), criteria.end());
  int failed = 0;
  for (int id : wanted) {
    const auto& [name, fn] = table.at(id);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("AC%d %s %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
