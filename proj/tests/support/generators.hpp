#pragma once

// Random inputs for property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "hcot/hierarchy.hpp"
#include "hcot/types.hpp"

namespace gen {

/// Random two-level hierarchy over k fine classes with 1..k groups of
/// arbitrary (non-empty) sizes, fine indices shuffled.
inline hcot::LabelHierarchy random_hierarchy(std::mt19937_64& rng, hcot::Index k) {
  std::uniform_int_distribution<hcot::Index> groups_dist(1, k);
  const hcot::Index groups = groups_dist(rng);
  std::vector<hcot::Index> map(k);
  for (hcot::Index i = 0; i < k; ++i) map[i] = i < groups ? i : std::uniform_int_distribution<hcot::Index>(0, groups - 1)(rng);
  std::shuffle(map.begin(), map.end(), rng);
  return hcot::LabelHierarchy(std::move(map));
}

inline hcot::Matrix random_logits(std::mt19937_64& rng, hcot::Index n, hcot::Index k, double scale = 3.0) {
  std::normal_distribution<double> dist(0.0, scale);
  hcot::Matrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = dist(rng);
  return z;
}

inline std::vector<hcot::Index> random_labels(std::mt19937_64& rng, hcot::Index n, hcot::Index k) {
  std::uniform_int_distribution<hcot::Index> dist(0, k - 1);
  std::vector<hcot::Index> y(n);
  for (auto& v : y) v = dist(rng);
  return y;
}

inline hcot::Index uniform(std::mt19937_64& rng, hcot::Index lo, hcot::Index hi) {
  return std::uniform_int_distribution<hcot::Index>(lo, hi)(rng);
}

}  // namespace gen
