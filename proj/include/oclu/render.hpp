#pragma once

// Grayscale PGM dumps of stimuli and clustering results.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "oclu/clustering.hpp"
#include "oclu/stimuli.hpp"

namespace oclu {

// Gray level of label l among k labels: 255 * (l + 1) / k, background 0.
std::uint8_t label_gray(int label, int k);

// Input raster, 0 or 255 per pixel.
std::vector<std::uint8_t> render_input(const BinaryImage& image);

// Ground-truth map with k distinct nonzero gray levels; noise stays 0.
std::vector<std::uint8_t> render_ground_truth(const Stimulus& stimulus);

// Every point's pixel painted with the gray of its predicted label. Where
// several points share a pixel the last one wins.
std::vector<std::uint8_t> render_prediction(const Stimulus& stimulus,
                                            const ClusteringResult& result);

// Writes <stem>.input.pgm and <stem>.gt.pgm, plus <stem>.<method>.pgm for
// each result.
void render_stimulus(const std::filesystem::path& dir, const std::string& stem,
                     const Stimulus& stimulus, const std::vector<ClusteringResult>& results = {});

}  // namespace oclu
