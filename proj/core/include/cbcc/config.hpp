#pragma once

// Experiment configuration: a flat key=value file, CBCC_* environment
// variables and command-line flags, applied in that order so later sources
// win (defaults < file < environment < command line).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbcc/bandit.hpp"
#include "cbcc/dataio.hpp"
#include "cbcc/policy.hpp"

namespace cbcc {

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<PolicyKind> policies{PolicyKind::kTscc};
  std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
  std::optional<std::size_t> rounds;  // unset: passes * rows
  std::size_t passes = 10;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  HyperParams hyper;
  std::optional<std::size_t> cap;
  std::size_t workers = 1;
  std::filesystem::path out = "results";
  std::optional<std::filesystem::path> cache;

  // Throws ConfigError.
  void validate() const;
  std::size_t rounds_for(std::size_t dataset_rows) const;
};

using KeyValues = std::map<std::string, std::string>;

// Every key understood by apply_settings().
const std::vector<std::string>& config_keys();

// "key = value" lines; '#' starts a comment. Throws ConfigError.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::filesystem::path& path);

// CBCC_<KEY> variables for every known key, looked up through `getenv`.
KeyValues environment_settings(
    const std::function<const char*(const char*)>& getenv_fn);

// Throws ConfigError on an unknown key or an unparsable value.
void apply_settings(ExperimentConfig& cfg, const KeyValues& settings);

// Canonical key=value rendering of every field, one per line.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace cbcc
