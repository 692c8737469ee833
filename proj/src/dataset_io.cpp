#include "oclu/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace oclu {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
json interval_json(const Interval<T>& i) {
  return json::array({i.lo, i.hi});
}

template <typename T>
void read_interval(const json& j, const char* key, Interval<T>& out) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) {
    throw std::invalid_argument(std::string("spec field '") + key + "' must be [lo, hi]");
  }
  out.lo = a[0].get<T>();
  out.hi = a[1].get<T>();
}

[[noreturn]] void io_error(const fs::path& p, const std::string& what) {
  throw std::runtime_error(p.string() + ": " + what);
}

}  // namespace

json to_json(const ShapeSceneSpec& s) {
  json shapes = json::array();
  for (auto k : s.shapes) shapes.push_back(std::string(to_string(k)));
  return {{"kind", "shape"},
          {"shapes", shapes},
          {"object_count", interval_json(s.object_count)},
          {"density", interval_json(s.density)},
          {"scale", interval_json(s.scale)},
          {"image_size", s.image_size},
          {"same_shape", s.same_shape},
          {"label_order", std::string(to_string(s.label_order))},
          {"seed", s.seed}};
}

json to_json(const GaussianSceneSpec& s) {
  return {{"kind", "gaussian"},
          {"cluster_counts", s.cluster_counts},
          {"mean_range", interval_json(s.mean_range)},
          {"points", interval_json(s.points)},
          {"covariance_scale", s.covariance_scale},
          {"min_mean_separation", s.min_mean_separation},
          {"image_size", s.image_size},
          {"label_order", std::string(to_string(s.label_order))},
          {"seed", s.seed}};
}

json to_json(const SceneSpec& spec) {
  return std::visit([](const auto& s) { return to_json(s); }, spec);
}

SceneSpec scene_spec_from_json(const json& j) {
  const std::string kind = j.value("kind", "shape");
  if (kind == "shape") {
    ShapeSceneSpec s;
    if (j.contains("shapes")) {
      s.shapes.clear();
      for (const auto& name : j.at("shapes")) s.shapes.insert(parse_shape_kind(name.get<std::string>()));
    }
    read_interval(j, "object_count", s.object_count);
    read_interval(j, "density", s.density);
    read_interval(j, "scale", s.scale);
    s.image_size = j.value("image_size", s.image_size);
    s.same_shape = j.value("same_shape", s.same_shape);
    s.label_order = parse_label_order(j.value("label_order", std::string("topdown")));
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  }
  if (kind == "gaussian") {
    GaussianSceneSpec s;
    if (j.contains("cluster_counts")) s.cluster_counts = j.at("cluster_counts").get<std::set<int>>();
    read_interval(j, "mean_range", s.mean_range);
    read_interval(j, "points", s.points);
    s.covariance_scale = j.value("covariance_scale", s.covariance_scale);
    s.min_mean_separation = j.value("min_mean_separation", s.min_mean_separation);
    s.image_size = j.value("image_size", s.image_size);
    s.label_order = parse_label_order(j.value("label_order", std::string("topdown")));
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  }
  throw std::invalid_argument("unknown scene kind '" + kind + "'");
}

int scene_image_size(const SceneSpec& spec) {
  return std::visit([](const auto& s) { return s.image_size; }, spec);
}

Stimulus generate_stimulus(const SceneSpec& spec, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> Stimulus {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ShapeSceneSpec>) {
          return generate_shape_stimulus(s, rng);
        } else {
          return generate_gaussian_stimulus(s, rng);
        }
      },
      spec);
}

void write_pgm(const fs::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("write_pgm: pixel count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error(path, "cannot open for writing");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) io_error(path, "write failed");
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open");
  std::string magic;
  in >> magic;
  if (magic != "P5") io_error(path, "not a binary PGM (P5)");
  auto next_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
      in >> std::ws;
    }
    int v = -1;
    in >> v;
    return v;
  };
  GrayImage img;
  img.width = next_int();
  img.height = next_int();
  const int maxval = next_int();
  if (img.width <= 0 || img.height <= 0 || maxval != 255) io_error(path, "unsupported PGM header");
  in.get();  // single whitespace byte before the raster
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) io_error(path, "truncated raster");
  return img;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const fs::path& path) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) io_error(path, "bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const fs::path& path) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) io_error(path, "bad integer '" + s + "'");
  return v;
}

}  // namespace

void save_stimulus(const fs::path& dir, const std::string& stem, const Stimulus& s) {
  const int n = s.image_size();
  const auto pts_path = dir / (stem + ".points");
  std::ofstream out(pts_path);
  if (!out) io_error(pts_path, "cannot open for writing");
  out << "# oclu-points v1 k=" << s.point_set.k << " n=" << s.point_set.size()
      << " noise=" << s.noise_pixels.size() << " size=" << n << '\n';
  for (std::size_t i = 0; i < s.point_set.size(); ++i) {
    const auto& p = s.point_set.points[i];
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << s.point_set.labels[i] << '\n';
  }
  for (const auto& px : s.noise_pixels) out << px.x << ' ' << px.y << " noise\n";
  if (!out) io_error(pts_path, "write failed");

  std::vector<std::uint8_t> img(s.image.pixels.size()), gt(s.image.pixels.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = s.image.pixels[i] ? 255 : 0;
    const int label = s.gt_label_map.pixels[i];
    if (label > 254) throw std::invalid_argument("save_stimulus: label too large for 8-bit map");
    gt[i] = static_cast<std::uint8_t>(label + 1);
  }
  write_pgm(dir / (stem + ".img.pgm"), n, n, img);
  write_pgm(dir / (stem + ".gt.pgm"), n, n, gt);
}

Stimulus load_stimulus(const fs::path& dir, const std::string& stem) {
  const auto pts_path = dir / (stem + ".points");
  std::ifstream in(pts_path);
  if (!in) io_error(pts_path, "cannot open");
  std::string header;
  std::getline(in, header);
  int k = -1, size = -1;
  std::size_t n = 0, noise = 0;
  if (std::sscanf(header.c_str(), "# oclu-points v1 k=%d n=%zu noise=%zu size=%d", &k, &n, &noise,
                  &size) != 4) {
    io_error(pts_path, "bad header");
  }

  Stimulus s;
  s.point_set.k = k;
  std::string a, b, c;
  for (std::size_t i = 0; i < n + noise; ++i) {
    if (!(in >> a >> b >> c)) io_error(pts_path, "truncated point list");
    if (i < n) {
      s.point_set.points.push_back({parse_double(a, pts_path), parse_double(b, pts_path)});
      s.point_set.labels.push_back(parse_int(c, pts_path));
    } else {
      if (c != "noise") io_error(pts_path, "expected a noise row");
      s.noise_pixels.push_back({parse_int(a, pts_path), parse_int(b, pts_path)});
    }
  }

  const auto img = read_pgm(dir / (stem + ".img.pgm"));
  const auto gt = read_pgm(dir / (stem + ".gt.pgm"));
  if (img.width != size || img.height != size || gt.width != size || gt.height != size) {
    io_error(dir / stem, "raster size disagrees with point file");
  }
  s.image = BinaryImage(size, 0);
  s.gt_label_map = LabelMap(size, kBackground);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    s.image.pixels[i] = img.pixels[i] ? 1 : 0;
    s.gt_label_map.pixels[i] = static_cast<int>(gt.pixels[i]) - 1;
  }
  s.point_set.validate(size);
  return s;
}

Dataset generate_dataset(const SceneSpec& spec, int count, std::uint64_t master_seed) {
  if (count < 0) throw std::invalid_argument("generate_dataset: negative count");
  Dataset ds{spec, master_seed, {}, {}};
  for (int i = 0; i < count; ++i) {
    const auto seed = derive_seed(master_seed, "stimulus", static_cast<std::uint64_t>(i));
    Rng rng(seed);
    ds.seeds.push_back(seed);
    ds.stimuli.push_back(generate_stimulus(spec, rng));
  }
  return ds;
}

std::string stimulus_stem(std::size_t index) {
  std::ostringstream os;
  os << std::setw(4) << std::setfill('0') << index;
  return os.str();
}

void save_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  json manifest = {{"format", "oclu-dataset"},
                   {"version", 1},
                   {"spec", to_json(ds.spec)},
                   {"count", ds.stimuli.size()},
                   {"master_seed", ds.master_seed},
                   {"seeds", ds.seeds}};
  for (std::size_t i = 0; i < ds.stimuli.size(); ++i) {
    save_stimulus(dir, stimulus_stem(i), ds.stimuli[i]);
  }
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) io_error(path, "cannot open for writing");
  out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) io_error(path, "cannot open (not a dataset directory?)");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    io_error(path, e.what());
  }
  if (manifest.value("format", "") != "oclu-dataset") io_error(path, "not an oclu dataset manifest");
  Dataset ds;
  ds.spec = scene_spec_from_json(manifest.at("spec"));
  ds.master_seed = manifest.value("master_seed", std::uint64_t{0});
  ds.seeds = manifest.value("seeds", std::vector<std::uint64_t>{});
  const auto count = manifest.at("count").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i) ds.stimuli.push_back(load_stimulus(dir, stimulus_stem(i)));
  return ds;
}

}  // namespace oclu
