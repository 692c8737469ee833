#pragma once

// On-disk dataset layout:
//
//   manifest.json      generator spec echo, count, master seed, per-item seeds
//   NNNN.points        "x y label" per point, then "x y noise" per noise pixel
//   NNNN.img.pgm       binary P5 raster, 0 background / 255 foreground
//   NNNN.gt.pgm        P5, label + 1 per pixel, 0 for background and noise

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oclu/stimuli.hpp"

namespace oclu {

using SceneSpec = std::variant<ShapeSceneSpec, GaussianSceneSpec>;

nlohmann::json to_json(const ShapeSceneSpec& spec);
nlohmann::json to_json(const GaussianSceneSpec& spec);
nlohmann::json to_json(const SceneSpec& spec);
// Expects a "kind" of "shape" or "gaussian"; missing fields keep defaults.
SceneSpec scene_spec_from_json(const nlohmann::json& j);

int scene_image_size(const SceneSpec& spec);
Stimulus generate_stimulus(const SceneSpec& spec, Rng& rng);

// 8-bit grayscale P5.
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};
GrayImage read_pgm(const std::filesystem::path& path);

void save_stimulus(const std::filesystem::path& dir, const std::string& stem, const Stimulus& s);
Stimulus load_stimulus(const std::filesystem::path& dir, const std::string& stem);

struct Dataset {
  SceneSpec spec;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<Stimulus> stimuli;
};

// Stimulus i is drawn from its own stream seeded by derive_seed(master,
// "stimulus", i), so datasets can be extended or regenerated piecewise.
Dataset generate_dataset(const SceneSpec& spec, int count, std::uint64_t master_seed);

std::string stimulus_stem(std::size_t index);
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace oclu
