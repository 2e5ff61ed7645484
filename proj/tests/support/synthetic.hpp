#pragma once

// Test-only data generators.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cbcc/dataio.hpp"
#include "cbcc/rng.hpp"

namespace cbcc::testing {

// Bag-of-words style classification data: each class owns a block of
// "topic" features that fire with probability `p_topic`; every other
// feature fires with probability `p_background`. Features are 0/1; the
// classes are balanced and rows appear in random class order.
inline Dataset make_topic_dataset(std::size_t rows, std::size_t dim, std::size_t classes,
                                  std::uint64_t seed, double p_topic = 0.35,
                                  double p_background = 0.03,
                                  const std::string& name = "synthetic") {
  RngStream rng(seed);
  Dataset ds;
  ds.name = name;
  ds.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  const std::size_t block = dim / classes;
  for (std::size_t c = 0; c < classes; ++c) ds.label_names.push_back("c" + std::to_string(c));
  std::vector<std::size_t> order(rows);
  for (std::size_t i = 0; i < rows; ++i) order[i] = i % classes;
  for (std::size_t i = rows; i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t label = order[i];
    ds.labels.push_back(label);
    for (std::size_t j = 0; j < dim; ++j) {
      const bool topic = block > 0 && j / block == label;
      const double p = topic ? p_topic : p_background;
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.uniform() < p ? 1.0 : 0.0;
    }
  }
  return ds;
}

}  // namespace cbcc::testing
