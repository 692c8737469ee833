#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace oclu {

// Column order of the comparison tables.
enum class Method { CNN, KMeans, FuzzyCMeans, NJW, NormalizedCut, MeanShift, CFSFDP };

inline constexpr Method kAllMethods[] = {Method::CNN,           Method::KMeans,
                                         Method::FuzzyCMeans,   Method::NJW,
                                         Method::NormalizedCut, Method::MeanShift,
                                         Method::CFSFDP};

// Short table names: CNN, kM, FCM, NJW, SC, MS, CFSFDP.
std::string_view method_name(Method m);
Method parse_method(std::string_view name);

struct ClusteringResult {
  std::vector<int> labels;
  int k_found = 0;
  Method method = Method::KMeans;
  std::map<std::string, double> params_used;
  double runtime_seconds = 0.0;
};

// Renumbers labels to 0..k-1 in order of first appearance; returns k.
int normalize_labels(std::vector<int>& labels);

}  // namespace oclu
