#pragma once

// Reference ranking and metric implementations written independently of the
// library: a full scan with a stable sort, and metrics computed from grade
// counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cadret/retrieval/retrieval.hpp"

namespace cadret::testing {

inline retrieval::QueryResult brute_force(const std::vector<std::pair<std::string, std::vector<float>>>& stored,
                                          const std::vector<float>& q, std::size_t k, const std::string& exclude = {}) {
  auto norm = [](const std::vector<float>& v) {
    double s = 0;
    for (float x : v) s += double(x) * double(x);
    return std::sqrt(s);
  };
  retrieval::QueryResult all;
  for (const auto& [id, v] : stored) {
    if (id == exclude) continue;
    double dot = 0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += double(q[i]) * double(v[i]);
    all.push_back({id, dot / (norm(q) * norm(v))});
  }
  std::stable_sort(all.begin(), all.end(), [](const retrieval::Hit& a, const retrieval::Hit& b) { return a.id < b.id; });
  std::stable_sort(all.begin(), all.end(),
                   [](const retrieval::Hit& a, const retrieval::Hit& b) { return a.score > b.score; });
  if (all.size() > k) all.resize(k);
  return all;
}

// grades[i] = label of the i-th returned candidate; pool = counts of grades 0, 1, 2.
inline double reference_recall(const std::vector<int>& grades, std::array<std::size_t, 3> pool, std::size_t k,
                               int min_grade) {
  std::size_t relevant = 0;
  for (int g = min_grade; g <= 2; ++g) relevant += pool[g];
  if (relevant == 0) return 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k && i < grades.size(); ++i) hits += grades[i] >= min_grade ? 1 : 0;
  return double(hits) / double(k < relevant ? k : relevant);
}

inline double reference_ndcg(const std::vector<int>& grades, std::array<std::size_t, 3> pool, std::size_t k) {
  const double gain[3] = {0.0, 1.0, 3.0};
  double dcg = 0;
  for (std::size_t i = 0; i < k && i < grades.size(); ++i) dcg += gain[grades[i]] / std::log2(double(i + 2));
  double idcg = 0;
  std::size_t pos = 0;
  for (int g = 2; g >= 0; --g) {
    for (std::size_t c = 0; c < pool[g] && pos < k; ++c, ++pos) idcg += gain[g] / std::log2(double(pos + 2));
  }
  return idcg > 0 ? dcg / idcg : 0;
}

}  // namespace cadret::testing
