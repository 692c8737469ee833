#pragma once

// Synthetic clustering stimuli: geometric shape scenes and Gaussian
// mixtures, rasterized to binary images with order-normalized labels.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oclu/rng.hpp"

namespace oclu {

enum class ShapeKind { Circle, Ring, Square, SquareRing, Bar };

std::string_view to_string(ShapeKind kind);
ShapeKind parse_shape_kind(std::string_view name);

inline constexpr ShapeKind kAllShapes[] = {ShapeKind::Circle, ShapeKind::Ring, ShapeKind::Square,
                                           ShapeKind::SquareRing, ShapeKind::Bar};

// Inner size of hollow shapes relative to their outer size.
inline constexpr double kRingInnerRatio = 0.8;
// Bar half-width relative to its half-length (a 2s x 0.4s rectangle).
inline constexpr double kBarWidthRatio = 0.2;

enum class LabelOrder { TopDown, Random };

std::string_view to_string(LabelOrder order);
LabelOrder parse_label_order(std::string_view name);

template <typename T>
struct Interval {
  T lo{};
  T hi{};
  bool contains(T v) const { return lo <= v && v <= hi; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct ShapeSceneSpec {
  std::set<ShapeKind> shapes{std::begin(kAllShapes), std::end(kAllShapes)};
  Interval<int> object_count{2, 2};
  Interval<int> density{200, 300};
  Interval<double> scale{10.0, 30.0};
  int image_size = 128;
  // All objects of one scene share a single randomly drawn kind.
  bool same_shape = false;
  LabelOrder label_order = LabelOrder::TopDown;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GaussianSceneSpec {
  std::set<int> cluster_counts{2, 3};
  Interval<double> mean_range{20.0, 100.0};
  Interval<int> points{100, 400};
  double covariance_scale = 25.0;
  // Means are redrawn until every pair is at least this far apart.
  double min_mean_separation = 0.0;
  int image_size = 128;
  LabelOrder label_order = LabelOrder::TopDown;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PointSet {
  std::vector<Point> points;
  std::vector<int> labels;
  int k = 0;

  std::size_t size() const { return points.size(); }
  void validate(int image_size) const;
  bool operator==(const PointSet&) const = default;
};

struct PixelCoord {
  int x = 0;
  int y = 0;
  bool operator==(const PixelCoord&) const = default;
};

// Row-major square raster; index = y * size + x, row 0 at the top.
template <typename T>
struct Raster {
  int size = 0;
  std::vector<T> pixels;

  Raster() = default;
  Raster(int n, T fill) : size(n), pixels(static_cast<std::size_t>(n) * n, fill) {}
  T& operator()(int x, int y) { return pixels[static_cast<std::size_t>(y) * size + x]; }
  const T& operator()(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * size + x];
  }
  bool operator==(const Raster&) const = default;
};

using BinaryImage = Raster<std::uint8_t>;
using LabelMap = Raster<std::int32_t>;

inline constexpr std::int32_t kBackground = -1;

struct Stimulus {
  PointSet point_set;
  BinaryImage image;
  LabelMap gt_label_map;
  std::vector<PixelCoord> noise_pixels;

  int image_size() const { return image.size; }
  bool operator==(const Stimulus&) const = default;
};

inline PixelCoord pixel_of(const Point& p) {
  return {static_cast<int>(p.x), static_cast<int>(p.y)};
}

// `density` points uniform inside the shape (scale = radius or half-side),
// rotated about the shape center and translated to `center`. Throws
// std::out_of_range if the rotated bounding box leaves [0, image_size).
std::vector<Point> sample_shape_points(ShapeKind kind, double scale, int density, double rotation,
                                       Point center, int image_size, Rng& rng);

// Half-extents of the axis-aligned bounding box of a rotated shape.
Point rotated_half_extents(ShapeKind kind, double scale, double rotation);

// True if `local` (shape frame, before rotation) lies inside the shape.
bool shape_contains(ShapeKind kind, double scale, Point local);

// Orders clusters by (min y, then min x) and labels them 0..k-1 in that order.
PointSet assign_topdown_labels(const std::vector<std::vector<Point>>& clusters);

// Same, then applies a uniformly random permutation to the label ids.
PointSet assign_labels(const std::vector<std::vector<Point>>& clusters, LabelOrder order,
                       Rng& rng);

struct RasterPair {
  BinaryImage image;
  LabelMap gt_label_map;
};

// Foreground at (floor x, floor y) of every point; contested pixels keep the
// lowest label.
RasterPair rasterize(const PointSet& point_set, int image_size);

struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

// scale * A'A for a 2 x 2 matrix A with entries uniform in [0, 1].
Covariance2 random_covariance(double scale, Rng& rng);

// `count` Gaussian draws inside [0, image_size)^2; draws outside are
// rejected. Throws std::runtime_error once more than 99% are rejected.
std::vector<Point> sample_gaussian_cluster(Point mean, const Covariance2& cov, int count,
                                           int image_size, Rng& rng);

Stimulus generate_shape_stimulus(const ShapeSceneSpec& spec, Rng& rng);
Stimulus generate_gaussian_stimulus(const GaussianSceneSpec& spec, Rng& rng);

// Flips `count` distinct background pixels to foreground; labels untouched.
Stimulus inject_noise(const Stimulus& stimulus, int count, Rng& rng);

// Label at each point's pixel, or -1 if the pixel is background.
std::vector<int> labels_at_points(const LabelMap& map, const PointSet& points);

}  // namespace oclu
