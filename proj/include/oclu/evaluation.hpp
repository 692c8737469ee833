#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "oclu/clustering.hpp"
#include "oclu/stimuli.hpp"

namespace oclu {

// Fraction of the n(n-1)/2 unordered point pairs on which two labelings
// agree about co-membership. Computed from the contingency table in
// O(n + k1*k2). Throws std::invalid_argument for n < 2 or length mismatch.
double pairwise_rand_accuracy(std::span<const int> gt, std::span<const int> pred);

struct EvalRecord {
  std::string stimulus_id;
  Method method = Method::KMeans;
  double accuracy = 0.0;
  std::size_t n = 0;
  std::size_t noise_excluded = 0;
  double runtime_seconds = 0.0;
};

// Scores the genuine points of a stimulus; noise pixels never enter.
EvalRecord evaluate_stimulus(const Stimulus& stimulus, const ClusteringResult& result,
                             std::string stimulus_id = {});

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

// Single-pass (Welford) mean and population standard deviation.
Summary summarize(std::span<const double> values);

// Per-method summary of the accuracies in `records`.
std::map<Method, Summary> aggregate(std::span<const EvalRecord> records);

// CSV header "stimulus_id,method,n,accuracy,runtime".
void write_records_csv(std::ostream& os, std::span<const EvalRecord> records);

}  // namespace oclu
