#include "oclu/stimuli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oclu {

namespace {

constexpr int kPlacementRetries = 1000;

[[noreturn]] void spec_error(const std::string& what) {
  throw std::invalid_argument("invalid spec: " + what);
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Circle:
      return "circle";
    case ShapeKind::Ring:
      return "ring";
    case ShapeKind::Square:
      return "square";
    case ShapeKind::SquareRing:
      return "square_ring";
    case ShapeKind::Bar:
      return "bar";
  }
  return "?";
}

ShapeKind parse_shape_kind(std::string_view name) {
  for (auto k : kAllShapes) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown shape kind '" + std::string(name) + "'");
}

std::string_view to_string(LabelOrder order) {
  return order == LabelOrder::TopDown ? "topdown" : "random";
}

LabelOrder parse_label_order(std::string_view name) {
  if (name == "topdown") return LabelOrder::TopDown;
  if (name == "random") return LabelOrder::Random;
  throw std::invalid_argument("unknown label order '" + std::string(name) + "'");
}

void ShapeSceneSpec::validate() const {
  if (shapes.empty()) spec_error("no shape kinds");
  if (image_size <= 0) spec_error("image_size must be positive");
  if (object_count.lo < 1 || object_count.hi < object_count.lo) {
    spec_error("object_count range must satisfy 1 <= lo <= hi");
  }
  if (density.lo < 1 || density.hi < density.lo) {
    spec_error("density range must satisfy 1 <= lo <= hi");
  }
  if (!(scale.lo > 0) || scale.hi < scale.lo || !(scale.hi < image_size / 2.0)) {
    spec_error("scale range must lie in (0, image_size/2)");
  }
}

void GaussianSceneSpec::validate() const {
  if (cluster_counts.empty() || *cluster_counts.begin() < 1) {
    spec_error("cluster counts must be >= 1");
  }
  if (image_size <= 0) spec_error("image_size must be positive");
  if (mean_range.lo < 0 || mean_range.hi < mean_range.lo || !(mean_range.hi < image_size)) {
    spec_error("mean range must lie in [0, image_size)");
  }
  if (points.lo < 2 || points.hi < points.lo) spec_error("points range must satisfy 2 <= lo <= hi");
  if (!(covariance_scale > 0)) spec_error("covariance_scale must be > 0");
  if (min_mean_separation < 0) spec_error("min_mean_separation must be >= 0");
}

void PointSet::validate(int image_size) const {
  if (labels.size() != points.size()) {
    throw std::invalid_argument("point set: " + std::to_string(points.size()) + " points but " +
                                std::to_string(labels.size()) + " labels");
  }
  std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.x >= 0 && p.x < image_size && p.y >= 0 && p.y < image_size)) {
      throw std::invalid_argument("point set: point " + std::to_string(i) + " outside image");
    }
    if (labels[i] < 0 || labels[i] >= k) {
      throw std::invalid_argument("point set: label out of range at point " + std::to_string(i));
    }
    seen[labels[i]] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("point set: some cluster id in [0, k) is unused");
  }
}

bool shape_contains(ShapeKind kind, double s, Point p) {
  const double ax = std::abs(p.x), ay = std::abs(p.y);
  switch (kind) {
    case ShapeKind::Circle:
      return p.x * p.x + p.y * p.y <= s * s;
    case ShapeKind::Ring: {
      const double r2 = p.x * p.x + p.y * p.y;
      const double inner = kRingInnerRatio * s;
      return r2 <= s * s && r2 >= inner * inner;
    }
    case ShapeKind::Square:
      return ax <= s && ay <= s;
    case ShapeKind::SquareRing:
      return ax <= s && ay <= s && std::max(ax, ay) >= kRingInnerRatio * s;
    case ShapeKind::Bar:
      return ax <= s && ay <= kBarWidthRatio * s;
  }
  return false;
}

Point rotated_half_extents(ShapeKind kind, double s, double rotation) {
  if (kind == ShapeKind::Circle || kind == ShapeKind::Ring) return {s, s};
  const double a = s;
  const double b = kind == ShapeKind::Bar ? kBarWidthRatio * s : s;
  const double c = std::abs(std::cos(rotation)), sn = std::abs(std::sin(rotation));
  return {a * c + b * sn, a * sn + b * c};
}

std::vector<Point> sample_shape_points(ShapeKind kind, double scale, int density, double rotation,
                                       Point center, int image_size, Rng& rng) {
  if (!(scale > 0) || density < 0) throw std::invalid_argument("sample_shape_points: bad scale");
  const Point ext = rotated_half_extents(kind, scale, rotation);
  const double n = image_size;
  if (center.x - ext.x < 0 || center.x + ext.x >= n || center.y - ext.y < 0 ||
      center.y + ext.y >= n) {
    throw std::out_of_range("sample_shape_points: shape does not fit inside the image");
  }
  const double half_h = kind == ShapeKind::Bar ? kBarWidthRatio * scale : scale;
  const double c = std::cos(rotation), s = std::sin(rotation);
  const double top = std::nextafter(n, 0.0);

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(density));
  while (static_cast<int>(out.size()) < density) {
    const Point local{uniform(rng, -scale, scale), uniform(rng, -half_h, half_h)};
    if (!shape_contains(kind, scale, local)) continue;
    // Rounding can push a point on the bounding box a hair outside it.
    Point p{center.x + c * local.x - s * local.y, center.y + s * local.x + c * local.y};
    p.x = std::clamp(p.x, 0.0, top);
    p.y = std::clamp(p.y, 0.0, top);
    out.push_back(p);
  }
  return out;
}

PointSet assign_topdown_labels(const std::vector<std::vector<Point>>& clusters) {
  struct Key {
    double min_y, min_x;
    std::size_t index;
  };
  std::vector<Key> keys;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].empty()) throw std::invalid_argument("assign_topdown_labels: empty cluster");
    Key k{clusters[i][0].y, clusters[i][0].x, i};
    for (const auto& p : clusters[i]) {
      k.min_y = std::min(k.min_y, p.y);
      k.min_x = std::min(k.min_x, p.x);
    }
    keys.push_back(k);
  }
  if (keys.empty()) throw std::invalid_argument("assign_topdown_labels: no clusters");
  std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.min_y != b.min_y) return a.min_y < b.min_y;
    return a.min_x < b.min_x;
  });

  PointSet ps;
  ps.k = static_cast<int>(clusters.size());
  for (int label = 0; label < ps.k; ++label) {
    for (const auto& p : clusters[keys[label].index]) {
      ps.points.push_back(p);
      ps.labels.push_back(label);
    }
  }
  return ps;
}

PointSet assign_labels(const std::vector<std::vector<Point>>& clusters, LabelOrder order,
                       Rng& rng) {
  PointSet ps = assign_topdown_labels(clusters);
  if (order == LabelOrder::Random) {
    std::vector<int> perm(static_cast<std::size_t>(ps.k));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = ps.k - 1; i > 0; --i) std::swap(perm[i], perm[uniform_int(rng, 0, i)]);
    for (auto& l : ps.labels) l = perm[l];
  }
  return ps;
}

RasterPair rasterize(const PointSet& point_set, int image_size) {
  RasterPair out{BinaryImage(image_size, 0), LabelMap(image_size, kBackground)};
  for (std::size_t i = 0; i < point_set.size(); ++i) {
    const auto& p = point_set.points[i];
    if (!(p.x >= 0 && p.x < image_size && p.y >= 0 && p.y < image_size)) {
      throw std::invalid_argument("rasterize: point " + std::to_string(i) + " outside image");
    }
    const auto px = pixel_of(p);
    out.image(px.x, px.y) = 1;
    auto& gt = out.gt_label_map(px.x, px.y);
    const int label = point_set.labels[i];
    if (gt == kBackground || label < gt) gt = label;
  }
  return out;
}

namespace {

Stimulus make_stimulus(PointSet ps, int image_size) {
  auto raster = rasterize(ps, image_size);
  return Stimulus{std::move(ps), std::move(raster.image), std::move(raster.gt_label_map), {}};
}

template <typename T>
T pick(const std::set<T>& options, Rng& rng) {
  auto it = options.begin();
  std::advance(it, uniform_int(rng, 0, static_cast<std::int64_t>(options.size()) - 1));
  return *it;
}

}  // namespace

Stimulus generate_shape_stimulus(const ShapeSceneSpec& spec, Rng& rng) {
  spec.validate();
  const int k = static_cast<int>(uniform_int(rng, spec.object_count.lo, spec.object_count.hi));
  const ShapeKind shared = pick(spec.shapes, rng);
  const double n = spec.image_size;

  std::vector<std::vector<Point>> clusters;
  for (int obj = 0; obj < k; ++obj) {
    const ShapeKind kind = spec.same_shape ? shared : pick(spec.shapes, rng);
    const int density = static_cast<int>(uniform_int(rng, spec.density.lo, spec.density.hi));
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      const double scale = uniform(rng, spec.scale.lo, spec.scale.hi);
      const double rotation = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const Point ext = rotated_half_extents(kind, scale, rotation);
      if (!(2 * ext.x < n && 2 * ext.y < n)) continue;
      const Point center{uniform(rng, ext.x, n - ext.x), uniform(rng, ext.y, n - ext.y)};
      if (center.x + ext.x >= n || center.y + ext.y >= n) continue;
      clusters.push_back(
          sample_shape_points(kind, scale, density, rotation, center, spec.image_size, rng));
      placed = true;
    }
    if (!placed) throw std::runtime_error("generate_shape_stimulus: could not place object");
  }
  return make_stimulus(assign_labels(clusters, spec.label_order, rng), spec.image_size);
}

Covariance2 random_covariance(double scale, Rng& rng) {
  // A = [a b; c d] with entries in [0, 1]; covariance = scale * A'A.
  const double a = uniform(rng, 0, 1), b = uniform(rng, 0, 1);
  const double c = uniform(rng, 0, 1), d = uniform(rng, 0, 1);
  return {scale * (a * a + c * c), scale * (a * b + c * d), scale * (b * b + d * d)};
}

std::vector<Point> sample_gaussian_cluster(Point mean, const Covariance2& cov, int count,
                                           int image_size, Rng& rng) {
  // Cholesky factor of the 2x2 covariance; tolerates the singular case.
  const double l11 = std::sqrt(cov.xx);
  const double l21 = l11 > 0 ? cov.xy / l11 : 0.0;
  const double l22 = std::sqrt(std::max(0.0, cov.yy - l21 * l21));
  const double n = image_size;
  std::vector<Point> pts;
  pts.reserve(count);
  long attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > 100L * count) {
      throw std::runtime_error("generate_gaussian_stimulus: rejection rate above 99%");
    }
    const double z1 = standard_normal(rng), z2 = standard_normal(rng);
    const Point p{mean.x + l11 * z1, mean.y + l21 * z1 + l22 * z2};
    if (p.x >= 0 && p.x < n && p.y >= 0 && p.y < n) pts.push_back(p);
  }
  return pts;
}

Stimulus generate_gaussian_stimulus(const GaussianSceneSpec& spec, Rng& rng) {
  spec.validate();
  const int m = pick(spec.cluster_counts, rng);
  std::vector<Point> means;
  for (int attempt = 0; static_cast<int>(means.size()) < m; ++attempt) {
    if (attempt > kPlacementRetries * m) {
      throw std::runtime_error("generate_gaussian_stimulus: cannot separate means");
    }
    const Point c{uniform(rng, spec.mean_range.lo, spec.mean_range.hi),
                  uniform(rng, spec.mean_range.lo, spec.mean_range.hi)};
    const bool far = std::all_of(means.begin(), means.end(), [&](const Point& q) {
      return std::hypot(c.x - q.x, c.y - q.y) >= spec.min_mean_separation;
    });
    if (far) means.push_back(c);
  }

  std::vector<std::vector<Point>> clusters;
  for (const auto& mean : means) {
    const auto cov = random_covariance(spec.covariance_scale, rng);
    const int count = static_cast<int>(uniform_int(rng, spec.points.lo, spec.points.hi));
    clusters.push_back(sample_gaussian_cluster(mean, cov, count, spec.image_size, rng));
  }
  return make_stimulus(assign_labels(clusters, spec.label_order, rng), spec.image_size);
}

Stimulus inject_noise(const Stimulus& stimulus, int count, Rng& rng) {
  if (count < 0) throw std::invalid_argument("inject_noise: negative count");
  Stimulus out = stimulus;
  if (count == 0) return out;
  std::vector<std::size_t> background;
  for (std::size_t i = 0; i < out.image.pixels.size(); ++i) {
    if (out.image.pixels[i] == 0) background.push_back(i);
  }
  if (static_cast<std::size_t>(count) > background.size()) {
    throw std::invalid_argument("inject_noise: " + std::to_string(count) +
                                " noise pixels requested but only " +
                                std::to_string(background.size()) + " background pixels");
  }
  for (int i = 0; i < count; ++i) {
    const auto j = uniform_int(rng, i, static_cast<std::int64_t>(background.size()) - 1);
    std::swap(background[i], background[j]);
  }
  background.resize(count);
  std::sort(background.begin(), background.end());
  const int size = out.image.size;
  for (auto idx : background) {
    out.image.pixels[idx] = 1;
    out.noise_pixels.push_back({static_cast<int>(idx % size), static_cast<int>(idx / size)});
  }
  return out;
}

std::vector<int> labels_at_points(const LabelMap& map, const PointSet& points) {
  std::vector<int> out;
  out.reserve(points.size());
  for (const auto& p : points.points) {
    const auto px = pixel_of(p);
    out.push_back(map(px.x, px.y));
  }
  return out;
}

}  // namespace oclu
