#include "oclu/render.hpp"

#include <stdexcept>

#include "oclu/dataset_io.hpp"

namespace oclu {

std::uint8_t label_gray(int label, int k) {
  if (k < 1 || label < 0 || label >= k) {
    throw std::invalid_argument("label_gray: label " + std::to_string(label) + " outside 0.." +
                                std::to_string(k - 1));
  }
  return static_cast<std::uint8_t>(255 * (label + 1) / k);
}

std::vector<std::uint8_t> render_input(const BinaryImage& image) {
  std::vector<std::uint8_t> out(image.pixels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = image.pixels[i] ? 255 : 0;
  return out;
}

std::vector<std::uint8_t> render_ground_truth(const Stimulus& stimulus) {
  const auto& map = stimulus.gt_label_map;
  std::vector<std::uint8_t> out(map.pixels.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (map.pixels[i] != kBackground) out[i] = label_gray(map.pixels[i], stimulus.point_set.k);
  }
  return out;
}

std::vector<std::uint8_t> render_prediction(const Stimulus& stimulus,
                                            const ClusteringResult& result) {
  const auto& ps = stimulus.point_set;
  if (result.labels.size() != ps.size()) {
    throw std::invalid_argument("render_prediction: label count does not match the points");
  }
  const int n = stimulus.image_size();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(n) * n, 0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto px = pixel_of(ps.points[i]);
    out[static_cast<std::size_t>(px.y) * n + px.x] = label_gray(result.labels[i], result.k_found);
  }
  return out;
}

void render_stimulus(const std::filesystem::path& dir, const std::string& stem,
                     const Stimulus& stimulus, const std::vector<ClusteringResult>& results) {
  std::filesystem::create_directories(dir);
  const int n = stimulus.image_size();
  write_pgm(dir / (stem + ".input.pgm"), n, n, render_input(stimulus.image));
  write_pgm(dir / (stem + ".gt.pgm"), n, n, render_ground_truth(stimulus));
  for (const auto& r : results) {
    write_pgm(dir / (stem + "." + std::string(method_name(r.method)) + ".pgm"), n, n,
              render_prediction(stimulus, r));
  }
}

}  // namespace oclu
