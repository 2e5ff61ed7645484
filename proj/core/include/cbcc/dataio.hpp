#pragma once

// Delimited-text loading of labeled classification data, min-max
// normalization, stratified subsampling and the binary dataset cache.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbcc/bandit.hpp"
#include "cbcc/rng.hpp"

namespace cbcc {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DatasetSpec {
  std::filesystem::path path;
  // '\0' detects ',' or ';' from the first data line.
  char delimiter = '\0';
  // 0-based column holding the class; std::nullopt means the last column.
  std::optional<std::size_t> label_column;
  bool header = false;
  // Defaults to the file stem.
  std::string name;
};

struct Dataset {
  std::string name;
  FeatureMatrix features;                // n x d
  std::vector<ArmIndex> labels;          // n entries in [0, k)
  std::vector<std::string> label_names;  // arm index -> label token
  // Raw per-feature ranges recorded by normalize(); empty before.
  Vector raw_min;
  Vector raw_max;
  bool normalized = false;
  std::vector<std::string> warnings;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::size_t classes() const noexcept { return label_names.size(); }

  // Throws DataError unless every invariant holds.
  void validate() const;
};

Dataset load(const DatasetSpec& spec);
// Parses already-open text; `spec.path` is used only for naming.
Dataset parse_delimited(std::istream& in, const DatasetSpec& spec);

// Per-feature min-max scaling to [0, 1]; constant features map to 0.
// Idempotent on features; a second call keeps the original raw ranges.
Dataset normalize(Dataset ds);

// Per-column (min, max) of the current feature values.
std::pair<Vector, Vector> feature_ranges(const Dataset& ds);

// Stratified uniform subsample of `cap` rows (original row order kept).
// Returns ds unchanged when rows() <= cap.
Dataset subsample(const Dataset& ds, std::size_t cap, RngStream& rng);

// Binary cache: "CBCC", version byte, little-endian integers and 64-bit
// floats, features stored column by column.
inline constexpr std::uint8_t kCacheVersion = 1;
void write_cache(const Dataset& ds, const std::filesystem::path& path);
Dataset read_cache(const std::filesystem::path& path);

// Git blob id (SHA-1 of "blob <size>\0" + bytes) of a file, as hex.
std::string content_hash(const std::filesystem::path& path);

}  // namespace cbcc
