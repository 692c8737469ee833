#include "oclu/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace oclu {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Profile p) { return p == Profile::Desk ? "desk" : "paper"; }

Profile parse_profile(std::string_view name) {
  if (name == "desk") return Profile::Desk;
  if (name == "paper") return Profile::Paper;
  throw std::invalid_argument("unknown profile '" + std::string(name) + "' (desk, paper)");
}

// ------------------------------------------------------------- running

std::vector<ParamSetting> grid_settings(Method method, const BaselineGrid& grid, int image_size) {
  std::vector<ParamSetting> out;
  switch (method) {
    case Method::CNN:
      out.push_back({});
      break;
    case Method::KMeans:
      out.push_back({{"restarts", grid.kmeans_restarts}});
      break;
    case Method::FuzzyCMeans:
      out.push_back({{"m", grid.fcm.fuzziness},
                     {"tol", grid.fcm.tolerance},
                     {"max_iterations", grid.fcm.max_iterations}});
      break;
    case Method::NJW:
    case Method::NormalizedCut:
      for (double f : grid.sigma_factors) out.push_back({{"sigma_factor", f}});
      break;
    case Method::MeanShift:
      for (double f : grid.bandwidth_factors) out.push_back({{"bandwidth", f * image_size}});
      break;
    case Method::CFSFDP:
      for (double p : grid.cfsfdp_percentiles) out.push_back({{"percentile", p}});
      break;
  }
  if (out.empty()) {
    throw std::invalid_argument("empty parameter grid for " + std::string(method_name(method)));
  }
  return out;
}

namespace {

double setting(const ParamSetting& s, const char* key) {
  const auto it = s.find(key);
  if (it == s.end()) throw std::invalid_argument(std::string("missing parameter '") + key + "'");
  return it->second;
}

std::vector<Point> baseline_points(const Stimulus& s) {
  std::vector<Point> pts = s.point_set.points;
  for (const auto& px : s.noise_pixels) pts.push_back({px.x + 0.5, px.y + 0.5});
  return pts;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

ClusteringResult run_method(Method method, const Stimulus& stimulus, const ParamSetting& s,
                            Rng& rng, const UNetModel* model) {
  if (method == Method::CNN) {
    if (!model) throw std::invalid_argument("run_method: CNN needs a model");
    return predict_labels(*model, stimulus);
  }
  const auto start = std::chrono::steady_clock::now();
  const auto points = baseline_points(stimulus);
  const int k = stimulus.point_set.k;
  ClusteringResult r;
  switch (method) {
    case Method::KMeans:
      r = kmeans(points, k, static_cast<int>(setting(s, "restarts")), rng).result;
      break;
    case Method::FuzzyCMeans: {
      FuzzyCMeansParams p;
      p.fuzziness = setting(s, "m");
      p.tolerance = setting(s, "tol");
      p.max_iterations = static_cast<int>(setting(s, "max_iterations"));
      r = fuzzy_cmeans(points, k, p, rng).result;
      break;
    }
    case Method::NJW:
    case Method::NormalizedCut: {
      AffinityParams a;
      a.rule = SigmaRule::MedianHeuristic;
      a.median_factor = setting(s, "sigma_factor");
      r = method == Method::NJW ? spectral_njw(points, k, a, rng) : normalized_cut(points, k, a, rng);
      break;
    }
    case Method::MeanShift:
      r = mean_shift(points, setting(s, "bandwidth")).result;
      break;
    case Method::CFSFDP: {
      CfsfdpParams p;
      p.centers = k;
      p.percentile = setting(s, "percentile");
      r = cfsfdp(points, p).result;
      break;
    }
    case Method::CNN:
      break;
  }
  if (!stimulus.noise_pixels.empty()) {
    r.labels.resize(stimulus.point_set.size());
    r.k_found = normalize_labels(r.labels);
  }
  for (const auto& [key, v] : s) r.params_used.emplace(key, v);
  r.runtime_seconds = seconds_since(start);
  return r;
}

BenchResult bench(const std::vector<Stimulus>& test, const BenchOptions& options) {
  if (options.methods.empty()) throw std::invalid_argument("bench: no methods given");
  if (test.empty()) throw std::invalid_argument("bench: empty test set");
  std::vector<Method> methods = options.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  if (methods.front() == Method::CNN && !options.model) {
    throw std::invalid_argument("bench: CNN needs a checkpoint");
  }

  BenchResult out;
  for (Method m : methods) {
    const auto name = method_name(m);
    MethodRow best_row;
    std::vector<EvalRecord> best_records;
    bool have = false;
    for (const auto& s : grid_settings(m, options.grid, test.front().image_size())) {
      std::vector<EvalRecord> records;
      std::vector<double> acc;
      for (std::size_t i = 0; i < test.size(); ++i) {
        Rng rng = make_rng(options.seed, name, i);
        const auto r = run_method(m, test[i], s, rng, options.model);
        records.push_back(evaluate_stimulus(test[i], r, stimulus_stem(i)));
        acc.push_back(records.back().accuracy);
      }
      const auto summary = summarize(acc);
      if (!have || summary.mean > best_row.summary.mean) {
        best_row = {m, summary, s};
        best_records = std::move(records);
        have = true;
      }
    }
    out.rows.push_back(best_row);
    out.records.insert(out.records.end(), best_records.begin(), best_records.end());
  }
  return out;
}

// ------------------------------------------------------------- recipes

namespace {

json config_json(const UNetConfig& c) {
  return {{"depth", c.depth},
          {"base_filters", c.base_filters},
          {"output_channels", c.output_channels},
          {"image_size", c.image_size},
          {"kernel_size", c.kernel_size}};
}

json config_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},         {"seed", c.seed},
          {"deterministic", c.deterministic}, {"early_stop", c.early_stop}};
}

json config_json(const BaselineGrid& g) {
  return {{"kmeans_restarts", g.kmeans_restarts},
          {"fcm", {{"m", g.fcm.fuzziness}, {"tol", g.fcm.tolerance},
                   {"max_iterations", g.fcm.max_iterations}}},
          {"sigma_factors", g.sigma_factors},
          {"bandwidth_factors", g.bandwidth_factors},
          {"cfsfdp_percentiles", g.cfsfdp_percentiles}};
}

json methods_json(const std::vector<Method>& methods) {
  json a = json::array();
  for (auto m : methods) a.push_back(method_name(m));
  return a;
}

ShapeSceneSpec shape_spec(Profile p) {
  ShapeSceneSpec s;
  if (p == Profile::Desk) {
    s.image_size = 64;
    s.scale = {5.0, 15.0};
    s.density = {50, 75};
  }
  return s;
}

GaussianSceneSpec gaussian_spec(Profile p, Interval<int> paper_points) {
  GaussianSceneSpec s;
  s.cluster_counts = {2, 3};
  s.points = paper_points;
  if (p == Profile::Desk) {
    s.image_size = 64;
    s.mean_range = {10.0, 50.0};
    s.covariance_scale = 6.25;
    s.points = {paper_points.lo / 4, paper_points.hi / 4};
  }
  return s;
}

// Experiments 1 and 3 keep their full training sets under the desk profile;
// at 64 x 64 they train within the desk time budget.
int scaled(Profile p, int paper_count) { return p == Profile::Desk ? paper_count / 5 : paper_count; }

}  // namespace

json ExperimentConfig::to_json() const {
  json sweep = json::array(), noise = json::array(), pre = json::array();
  for (int n : sweep_sizes) sweep.push_back(n);
  for (int n : noise_levels) noise.push_back(n);
  for (int n : prerequisites) pre.push_back(n);
  return {{"experiment", id},
          {"profile", oclu::to_string(profile)},
          {"description", description},
          {"train_spec", oclu::to_json(train_spec)},
          {"test_spec", oclu::to_json(test_spec)},
          {"train_size", train_size},
          {"test_size", test_size},
          {"model", config_json(model)},
          {"train", config_json(train)},
          {"grid", config_json(grid)},
          {"methods", methods_json(methods)},
          {"prerequisites", pre},
          {"sweep_sizes", sweep},
          {"min_updates", min_updates},
          {"noise_levels", noise},
          {"master_seed", master_seed},
          {"train_seed", train_seed},
          {"test_seed", test_seed}};
}

ExperimentConfig make_experiment(int id, Profile profile, std::uint64_t master_seed) {
  if (id < 1 || id > 9) throw std::invalid_argument("experiment id must be in 1..9");
  ExperimentConfig c;
  c.id = id;
  c.profile = profile;
  c.master_seed = master_seed;
  c.model = profile == Profile::Desk ? UNetConfig::desk() : UNetConfig::paper();
  c.train.seed = derive_seed(master_seed, "train-loop", static_cast<std::uint64_t>(id));
  c.train_seed = derive_seed(master_seed, "train-set", static_cast<std::uint64_t>(id));
  c.test_seed = derive_seed(master_seed, "test-set", static_cast<std::uint64_t>(id));

  auto two_objects = shape_spec(profile);
  auto three_rings = shape_spec(profile);
  three_rings.object_count = {3, 3};
  three_rings.shapes = {ShapeKind::Ring, ShapeKind::SquareRing, ShapeKind::Bar};

  switch (id) {
    case 1:
      c.description = "2 objects from 5 shapes";
      c.train_spec = c.test_spec = two_objects;
      c.train_size = 1800;
      break;
    case 2: {
      c.description = "2 objects of one shape, experiment 1 network";
      auto same = two_objects;
      same.same_shape = true;
      c.train_spec = c.test_spec = same;
      c.prerequisites = {1};
      break;
    }
    case 3:
      c.description = "3 objects from Ring, SquareRing, Bar";
      c.train_spec = c.test_spec = three_rings;
      c.train_size = 2700;
      break;
    case 4: {
      c.description = "3 objects from 5 shapes";
      auto three = two_objects;
      three.object_count = {3, 3};
      c.train_spec = c.test_spec = three;
      c.train_size = scaled(profile, 7000);
      break;
    }
    case 5:
    case 6: {
      c.description = id == 5 ? "2 or 3 Gaussian clusters of 100-400 points"
                              : "2 or 3 Gaussian clusters of 400-700 points";
      c.train_spec = c.test_spec = gaussian_spec(profile, id == 5 ? Interval<int>{100, 400}
                                                                  : Interval<int>{400, 700});
      c.train_size = scaled(profile, 15000);
      c.test_size = profile == Profile::Desk ? 200 : 1000;
      break;
    }
    case 7:
      c.description = "experiment 3 network on the experiment 1 test set";
      c.train_spec = c.test_spec = two_objects;
      c.test_seed = make_experiment(1, profile, master_seed).test_seed;
      c.prerequisites = {3};
      break;
    case 8:
      c.description = "training-set size sweep on 2 objects from 5 shapes";
      c.train_spec = c.test_spec = two_objects;
      c.sweep_sizes = profile == Profile::Desk ? std::vector<int>{1, 10, 100, 200, 600, 1400}
                                               : std::vector<int>{1, 10, 100, 1000, 3000, 7000};
      c.min_updates = 500;
      c.methods = {Method::CNN};
      break;
    case 9:
      c.description = "noise sweep with the experiment 1 and 5 networks";
      c.prerequisites = {1, 5};
      c.noise_levels = {250, 500, 1000};
      c.methods = {Method::CNN};
      c.train_spec = c.test_spec = two_objects;
      break;
  }
  return c;
}

// ------------------------------------------------------------- reports

fs::path experiment_dir(const fs::path& root, int id) {
  return root / ("exp" + std::to_string(id));
}

fs::path checkpoint_path(const fs::path& root, int id) {
  return experiment_dir(root, id) / "model.ckpt";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_summary_csv(std::ostream& os, const std::vector<MethodRow>& rows) {
  os << "method,mean,std\n";
  for (const auto& r : rows) {
    os << method_name(r.method) << ',' << fmt(r.summary.mean) << ',' << fmt(r.summary.stddev)
       << '\n';
  }
}

void write_loss_csv(std::ostream& os, const std::vector<double>& losses) {
  char buf[64];
  os << "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.9g", losses[e]);
    os << e + 1 << ',' << buf << '\n';
  }
}

void write_report(const fs::path& dir, const Report& report, bool deterministic) {
  fs::create_directories(dir);
  json config = report.config;
  config["deterministic"] = deterministic;
  if (!deterministic) config["wall_seconds"] = report.wall_seconds;
  open_out(dir / "config.json") << config.dump(2) << '\n';

  auto summary = open_out(dir / "report.csv");
  write_summary_csv(summary, report.rows);

  auto records = report.records;
  if (deterministic) {
    for (auto& r : records) r.runtime_seconds = 0.0;
  }
  auto rec = open_out(dir / "records.csv");
  write_records_csv(rec, records);

  if (!report.loss_history.empty()) {
    auto loss = open_out(dir / "loss.csv");
    write_loss_csv(loss, report.loss_history);
  }
  if (!report.curve.empty()) {
    auto curve = open_out(dir / "curve.csv");
    curve << "setting,mean,std\n";
    for (const auto& p : report.curve) {
      curve << p.setting << ',' << fmt(p.summary.mean) << ',' << fmt(p.summary.stddev) << '\n';
    }
  }
}

// ----------------------------------------------------------- experiments

namespace {

UNetModel load_prerequisite(const fs::path& root, int id, int image_size) {
  const auto path = checkpoint_path(root, id);
  if (!fs::exists(path)) {
    throw std::runtime_error("missing checkpoint of experiment " + std::to_string(id) + " at " +
                             path.string() + "; run that experiment first");
  }
  auto model = load_checkpoint(path);
  if (model.config.image_size != image_size) {
    throw std::runtime_error(path.string() + " was trained on " +
                             std::to_string(model.config.image_size) + " px images, this run uses " +
                             std::to_string(image_size) + " px");
  }
  return model;
}

Summary cnn_summary(const UNetModel& model, const std::vector<Stimulus>& test) {
  std::vector<double> acc;
  for (const auto& s : test) acc.push_back(evaluate_stimulus(s, predict_labels(model, s)).accuracy);
  return summarize(acc);
}

void say(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

TrainResult fit(UNetModel& model, const std::vector<Stimulus>& data, const TrainConfig& tc,
                std::ostream* log) {
  return train(model, data, tc, [&](int epoch, double loss) {
    if (log) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  epoch %d loss %.6g", epoch + 1, loss);
      *log << buf << std::endl;
    }
  });
}

// A checkpoint left by an earlier run of the identical recipe, with the loss
// history it recorded.
std::optional<UNetModel> earlier_model(const fs::path& dir, const json& config,
                                       std::vector<double>& loss_history) {
  const auto ckpt = dir / "model.ckpt";
  if (!fs::exists(ckpt) || !fs::exists(dir / "config.json") || !fs::exists(dir / "loss.csv")) {
    return std::nullopt;
  }
  std::ifstream in(dir / "config.json");
  json stored = json::parse(in, nullptr, false);
  if (stored.is_discarded() || !stored.is_object()) return std::nullopt;
  stored.erase("deterministic");
  stored.erase("wall_seconds");
  if (stored != config) return std::nullopt;

  std::ifstream loss(dir / "loss.csv");
  std::string line;
  std::getline(loss, line);
  loss_history.clear();
  while (std::getline(loss, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) return std::nullopt;
    loss_history.push_back(std::stod(line.substr(comma + 1)));
  }
  return load_checkpoint(ckpt);
}

}  // namespace

Report run_experiment(const ExperimentConfig& c, const fs::path& root, bool deterministic,
                      std::ostream* log, bool reuse_model) {
  const auto start = std::chrono::steady_clock::now();
  const auto dir = experiment_dir(root, c.id);
  fs::create_directories(dir);
  Report report;
  report.config = c.to_json();
  TrainConfig tc = c.train;
  tc.deterministic = deterministic;
  const std::uint64_t init_seed = derive_seed(c.master_seed, "init", static_cast<std::uint64_t>(c.id));
  const std::uint64_t bench_seed = derive_seed(c.master_seed, "bench", static_cast<std::uint64_t>(c.id));

  if (!c.noise_levels.empty()) {
    for (int pre : c.prerequisites) {
      const auto pc = make_experiment(pre, c.profile, c.master_seed);
      const auto model = load_prerequisite(root, pre, scene_image_size(pc.test_spec));
      say(log, "experiment " + std::to_string(c.id) + ": test set of experiment " + std::to_string(pre));
      const auto clean = generate_dataset(pc.test_spec, c.test_size, pc.test_seed).stimuli;
      std::vector<int> levels{0};
      levels.insert(levels.end(), c.noise_levels.begin(), c.noise_levels.end());
      for (int level : levels) {
        std::vector<Stimulus> noisy;
        for (std::size_t i = 0; i < clean.size(); ++i) {
          Rng rng = make_rng(derive_seed(c.master_seed, "noise", static_cast<std::uint64_t>(level)),
                             "stimulus", i);
          noisy.push_back(inject_noise(clean[i], level, rng));
        }
        const auto b = bench(noisy, {c.methods, c.grid, &model, bench_seed});
        for (const auto& row : b.rows) {
          report.curve.push_back({"exp" + std::to_string(pre) + " noise=" + std::to_string(level) +
                                      " " + std::string(method_name(row.method)),
                                  row.summary});
          say(log, "  " + report.curve.back().setting + " " + fmt(row.summary.mean));
        }
        if (pre == c.prerequisites.front() && level == 0) {
          report.rows = b.rows;
          report.records = b.records;
        }
      }
    }
  } else if (!c.sweep_sizes.empty()) {
    const int largest = *std::max_element(c.sweep_sizes.begin(), c.sweep_sizes.end());
    say(log, "experiment " + std::to_string(c.id) + ": generating " + std::to_string(largest) +
                 " training and " + std::to_string(c.test_size) + " test stimuli");
    const auto train_all = generate_dataset(c.train_spec, largest, c.train_seed).stimuli;
    const auto test = generate_dataset(c.test_spec, c.test_size, c.test_seed).stimuli;
    UNetModel model = build_unet(c.model, init_seed);
    report.curve.push_back({"untrained", cnn_summary(model, test)});
    say(log, "  untrained " + fmt(report.curve.back().summary.mean));
    for (int n : c.sweep_sizes) {
      model = build_unet(c.model, init_seed);
      const std::vector<Stimulus> subset(train_all.begin(), train_all.begin() + n);
      TrainConfig t = tc;
      const int batches = (n + t.batch_size - 1) / t.batch_size;
      t.epochs = std::max(t.epochs, (c.min_updates + batches - 1) / batches);
      say(log, "  n=" + std::to_string(n) + ", " + std::to_string(t.epochs) + " epochs");
      report.loss_history = fit(model, subset, t, log).loss_history;
      report.curve.push_back({"n=" + std::to_string(n), cnn_summary(model, test)});
      say(log, "  n=" + std::to_string(n) + " " + fmt(report.curve.back().summary.mean));
    }
    save_checkpoint(model, dir / "model.ckpt");
    const auto b = bench(test, {c.methods, c.grid, &model, bench_seed});
    report.rows = b.rows;
    report.records = b.records;
  } else {
    std::optional<UNetModel> model;
    const bool wants_cnn = std::find(c.methods.begin(), c.methods.end(), Method::CNN) != c.methods.end();
    if (c.train_size > 0 && wants_cnn && reuse_model &&
        (model = earlier_model(dir, report.config, report.loss_history))) {
      say(log, "experiment " + std::to_string(c.id) + ": reusing " + (dir / "model.ckpt").string());
    } else if (c.train_size > 0 && wants_cnn) {
      say(log, "experiment " + std::to_string(c.id) + ": generating " +
                   std::to_string(c.train_size) + " training stimuli");
      const auto data = generate_dataset(c.train_spec, c.train_size, c.train_seed).stimuli;
      model = build_unet(c.model, init_seed);
      report.loss_history = fit(*model, data, tc, log).loss_history;
      save_checkpoint(*model, dir / "model.ckpt");
    } else if (!c.prerequisites.empty() && wants_cnn) {
      model = load_prerequisite(root, c.prerequisites.front(), scene_image_size(c.test_spec));
    }
    say(log, "experiment " + std::to_string(c.id) + ": benchmarking " + std::to_string(c.test_size) +
                 " test stimuli");
    const auto test = generate_dataset(c.test_spec, c.test_size, c.test_seed).stimuli;
    const auto b = bench(test, {c.methods, c.grid, model ? &*model : nullptr, bench_seed});
    report.rows = b.rows;
    report.records = b.records;
  }

  report.wall_seconds = seconds_since(start);
  write_report(dir, report, deterministic);
  return report;
}

// ------------------------------------------------------- CLI operations

void cmd_gen(const SceneSpec& spec, int count, const fs::path& out, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("gen: count must be >= 0");
  save_dataset(out, generate_dataset(spec, count, seed));
}

TrainResult cmd_train(const fs::path& dataset, const UNetConfig& model_config,
                      const TrainConfig& train_config, const fs::path& checkpoint,
                      std::ostream* log) {
  const auto ds = load_dataset(dataset);
  if (ds.stimuli.empty()) throw std::invalid_argument("train: dataset " + dataset.string() + " is empty");
  for (std::size_t i = 0; i < ds.stimuli.size(); ++i) {
    const auto& s = ds.stimuli[i];
    if (s.point_set.k > model_config.output_channels) {
      throw std::invalid_argument("train: stimulus " + stimulus_stem(i) + " of " + dataset.string() +
                                  " has " + std::to_string(s.point_set.k) +
                                  " clusters but the model has " +
                                  std::to_string(model_config.output_channels) + " output channels");
    }
    if (s.image_size() != model_config.image_size) {
      throw std::invalid_argument("train: stimulus " + stimulus_stem(i) + " is " +
                                  std::to_string(s.image_size()) + " px, model expects " +
                                  std::to_string(model_config.image_size));
    }
  }
  auto model = build_unet(model_config, derive_seed(train_config.seed, "model"));
  const auto result = fit(model, ds.stimuli, train_config, log);
  if (checkpoint.has_parent_path()) fs::create_directories(checkpoint.parent_path());
  save_checkpoint(model, checkpoint);
  auto loss = open_out(fs::path(checkpoint.string() + ".loss.csv"));
  write_loss_csv(loss, result.loss_history);
  return result;
}

Report cmd_bench(const fs::path& dataset, const std::vector<Method>& methods,
                 const BaselineGrid& grid, const std::optional<fs::path>& checkpoint,
                 std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  if (methods.empty()) throw std::invalid_argument("bench: no methods given");
  const bool wants_cnn = std::find(methods.begin(), methods.end(), Method::CNN) != methods.end();
  if (wants_cnn && !checkpoint) throw std::invalid_argument("bench: method CNN needs a checkpoint");
  const auto ds = load_dataset(dataset);
  std::optional<UNetModel> model;
  if (wants_cnn) model = load_checkpoint(*checkpoint);

  Report report;
  report.config = {{"dataset", dataset.string()},
                   {"spec", to_json(ds.spec)},
                   {"count", ds.stimuli.size()},
                   {"methods", methods_json(methods)},
                   {"grid", config_json(grid)},
                   {"checkpoint", checkpoint ? checkpoint->string() : ""},
                   {"seed", seed}};
  const auto b = bench(ds.stimuli, {methods, grid, model ? &*model : nullptr, seed});
  report.rows = b.rows;
  report.records = b.records;
  report.wall_seconds = seconds_since(start);
  return report;
}

}  // namespace oclu
