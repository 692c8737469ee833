#include "oclu/clustering.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>

namespace oclu {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::CNN:
      return "CNN";
    case Method::KMeans:
      return "kM";
    case Method::FuzzyCMeans:
      return "FCM";
    case Method::NJW:
      return "NJW";
    case Method::NormalizedCut:
      return "SC";
    case Method::MeanShift:
      return "MS";
    case Method::CFSFDP:
      return "CFSFDP";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  if (name == "NC") return Method::NormalizedCut;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected CNN, kM, FCM, NJW, SC, MS or CFSFDP)");
}

int normalize_labels(std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  for (auto& l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  return static_cast<int>(remap.size());
}

}  // namespace oclu
