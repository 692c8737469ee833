#include "oclu/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace oclu {

namespace {

double pairs(double count) { return count * (count - 1.0) / 2.0; }

}  // namespace

double pairwise_rand_accuracy(std::span<const int> gt, std::span<const int> pred) {
  if (gt.size() != pred.size()) {
    throw std::invalid_argument("pairwise_rand_accuracy: " + std::to_string(gt.size()) +
                                " ground-truth labels vs " + std::to_string(pred.size()) +
                                " predicted");
  }
  const std::size_t n = gt.size();
  if (n < 2) throw std::invalid_argument("pairwise_rand_accuracy: need at least 2 points");

  std::unordered_map<int, double> row, col;
  std::unordered_map<long long, double> cell;
  for (std::size_t i = 0; i < n; ++i) {
    row[gt[i]] += 1;
    col[pred[i]] += 1;
    cell[(static_cast<long long>(gt[i]) << 32) ^ static_cast<unsigned>(pred[i])] += 1;
  }
  double both = 0, same_gt = 0, same_pred = 0;
  for (const auto& [_, c] : cell) both += pairs(c);
  for (const auto& [_, c] : row) same_gt += pairs(c);
  for (const auto& [_, c] : col) same_pred += pairs(c);
  const double disagree = same_gt + same_pred - 2.0 * both;
  return 1.0 - disagree / pairs(static_cast<double>(n));
}

EvalRecord evaluate_stimulus(const Stimulus& stimulus, const ClusteringResult& result,
                             std::string stimulus_id) {
  const auto& ps = stimulus.point_set;
  if (result.labels.size() != ps.size()) {
    throw std::invalid_argument("evaluate_stimulus: " + std::to_string(result.labels.size()) +
                                " predicted labels for " + std::to_string(ps.size()) + " points");
  }
  EvalRecord r;
  r.stimulus_id = std::move(stimulus_id);
  r.method = result.method;
  r.accuracy = pairwise_rand_accuracy(ps.labels, result.labels);
  r.n = ps.size();
  r.noise_excluded = stimulus.noise_pixels.size();
  r.runtime_seconds = result.runtime_seconds;
  return r;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  Summary s;
  double m2 = 0.0;
  for (double v : values) {
    ++s.count;
    const double delta = v - s.mean;
    s.mean += delta / static_cast<double>(s.count);
    m2 += delta * (v - s.mean);
  }
  s.stddev = std::sqrt(std::max(0.0, m2 / static_cast<double>(s.count)));
  return s;
}

std::map<Method, Summary> aggregate(std::span<const EvalRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  std::map<Method, std::vector<double>> by_method;
  for (const auto& r : records) by_method[r.method].push_back(r.accuracy);
  std::map<Method, Summary> out;
  for (const auto& [m, acc] : by_method) out[m] = summarize(acc);
  return out;
}

void write_records_csv(std::ostream& os, std::span<const EvalRecord> records) {
  os << "stimulus_id,method,n,accuracy,runtime\n";
  char buf[64];
  for (const auto& r : records) {
    os << r.stimulus_id << ',' << method_name(r.method) << ',' << r.n << ',';
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.accuracy, r.runtime_seconds);
    os << buf << '\n';
  }
}

}  // namespace oclu
