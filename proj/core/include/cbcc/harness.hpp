#pragma once

// Experiment grid runner: (policy x corruption level x repetition) cells
// over one dataset, per-round records, Table-style summaries and per-level
// error curves.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cbcc/config.hpp"
#include "cbcc/dataio.hpp"
#include "cbcc/policy.hpp"

namespace cbcc {

struct RoundRecord {
  std::string dataset;
  std::uint64_t run = 0;  // level_index * repetitions + repetition
  std::size_t level_index = 0;
  std::size_t repetition = 0;
  std::size_t t = 0;
  PolicyKind policy = PolicyKind::kTscc;
  double p_corrupt = 0.0;
  ArmIndex arm = 0;
  int reward = 0;
  bool was_corrupted = false;
  int alpha = -1;
  std::size_t cumulative_error = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct SummaryRow {
  std::string dataset;
  PolicyKind policy = PolicyKind::kTscc;
  double mean_error_pct = 0.0;
  double std_error_pct = 0.0;  // sample std over cells; 0 for a single cell
  std::size_t cells = 0;
};

struct LevelSummaryRow {
  std::string dataset;
  PolicyKind policy = PolicyKind::kTscc;
  double p_corrupt = 0.0;
  double mean_error_pct = 0.0;
  double std_error_pct = 0.0;
  std::size_t cells = 0;
};

struct CellSpec {
  std::size_t level_index = 0;
  std::size_t repetition = 0;
  double p_corrupt = 0.0;
  std::uint64_t run = 0;
};

struct CellResult {
  CellSpec cell;
  std::size_t rounds = 0;
  std::size_t errors = 0;
  double error_pct() const noexcept {
    return rounds == 0 ? 0.0 : 100.0 * static_cast<double>(errors) / static_cast<double>(rounds);
  }
};

using RecordSink = std::function<void(const RoundRecord&)>;

// Loads, normalizes and (when cfg.cap is set) subsamples the dataset.
// Reads/writes cfg.cache when configured.
std::shared_ptr<const Dataset> prepare_dataset(const ExperimentConfig& cfg);

// Cells in canonical order: level-major, then repetition.
std::vector<CellSpec> grid_cells(const ExperimentConfig& cfg);

// Key of the cell's RNG stream; injective over (level, repetition).
RngStream cell_stream(std::uint64_t base_seed, const CellSpec& cell);

// One fresh environment and policy; loops next_round -> select -> step -> update.
CellResult run_cell(const ExperimentConfig& cfg, std::shared_ptr<const Dataset> dataset,
                    PolicyKind policy, const CellSpec& cell, const RecordSink& sink = {});

// Runs every cell on up to cfg.workers threads. Results come back in
// grid_cells() order. make_sink (optional) is called once per cell, from
// the worker thread running it.
std::vector<CellResult> run_cells(
    const ExperimentConfig& cfg, std::shared_ptr<const Dataset> dataset, PolicyKind policy,
    const std::function<RecordSink(const CellSpec&)>& make_sink = {});

// All records of the grid for one policy, in grid order then t.
std::vector<RoundRecord> run_experiment(const ExperimentConfig& cfg,
                                        std::shared_ptr<const Dataset> dataset,
                                        PolicyKind policy);

// Delimited record files.
std::string record_header();
std::string format_record(const RoundRecord& r);
void write_records(std::ostream& out, const std::vector<RoundRecord>& records);
std::vector<RoundRecord> read_records(std::istream& in);
std::vector<RoundRecord> read_records(const std::filesystem::path& path);

// Throws EmptyInput on no records. Invariant to record order.
std::vector<SummaryRow> summarize(const std::vector<RoundRecord>& records);
std::vector<LevelSummaryRow> summarize_by_level(const std::vector<RoundRecord>& records);

struct CurvePoint {
  std::size_t t = 0;
  PolicyKind policy = PolicyKind::kTscc;
  double mean_cumulative_error = 0.0;
};
struct Curve {
  std::string dataset;
  double p_corrupt = 0.0;
  std::vector<CurvePoint> points;  // sorted by policy, then t
};

// Mean cumulative error across repetitions, per (dataset, level, policy, t).
std::vector<Curve> build_curves(const std::vector<RoundRecord>& records);
// One file per (dataset, level): columns t,policy,mean_cumulative_error.
std::vector<std::filesystem::path> emit_curves(const std::vector<RoundRecord>& records,
                                               const std::filesystem::path& dir);

// Writes `contents` to a temp file beside `path` and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

struct RunOutputs {
  std::vector<std::filesystem::path> record_files;
  std::vector<std::filesystem::path> metadata_files;
};

// Runs every configured policy and writes records_<dataset>_<policy>.csv
// and run_<dataset>_<policy>.meta into cfg.out. Cells run in parallel; the
// merged file is written by one thread, so its bytes do not depend on the
// worker count.
RunOutputs run_to_directory(const ExperimentConfig& cfg);

// All records_*.csv files in a directory, concatenated in file-name order.
std::vector<RoundRecord> read_record_directory(const std::filesystem::path& dir);

std::string format_summary_table(const std::vector<SummaryRow>& rows);
std::string format_summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace cbcc
