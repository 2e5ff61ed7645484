// cbcc: run the experiment grid, then summarize or plot-ready curves.
//
//   cbcc run [--config FILE] [--dataset PATH] [--policy LIST] [--levels LIST] ...
//   cbcc summarize --in DIR [--csv] [--by-level]
//   cbcc curves --in DIR [--out DIR]
//
// Settings are layered: built-in defaults < config file < CBCC_* environment
// variables < command-line flags.
//
// Exit status: 0 ok, 1 other error, 2 configuration error, 3 data error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbcc/config.hpp"
#include "cbcc/errors.hpp"
#include "cbcc/harness.hpp"

namespace fs = std::filesystem;
using namespace cbcc;

namespace {

std::string format_level_table(const std::vector<LevelSummaryRow>& rows) {
  std::string out = "dataset       policy  p_corrupt  mean_error_pct  std_error_pct  cells\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-13s %-7s %9.2f  %14.2f  %13.2f  %5zu\n", r.dataset.c_str(),
                  std::string(to_string(r.policy)).c_str(), r.p_corrupt, r.mean_error_pct,
                  r.std_error_pct, r.cells);
    out += line;
  }
  return out;
}

std::vector<fs::path> record_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("records_") && name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<RoundRecord> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  return read_record_directory(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual bandits with corrupted contexts: experiment runner"};
  app.require_subcommand(1);

  // run ----------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run the (policy x level x repetition) grid");
  std::string config_file;
  KeyValues cli;
  run->add_option("--config", config_file, "key = value settings file")
      ->check(CLI::ExistingFile);
  // Every flag maps onto a settings key and is validated by the same parser
  // as the config file.
  const std::vector<std::pair<std::string, std::string>> flags{
      {"dataset", "delimited data file"},
      {"name", "dataset name used in record files"},
      {"delimiter", "',', ';' or auto"},
      {"label-column", "0-based label column, or 'last'"},
      {"header", "first line is a header (true/false)"},
      {"cache", "binary cache file for the prepared dataset"},
      {"policy", "comma list of mab,nsmab,cmab,tscc, or 'all'"},
      {"levels", "comma list of corruption probabilities"},
      {"rounds", "rounds per run, or 'auto' (passes x rows)"},
      {"passes", "passes over the data when rounds is auto"},
      {"reps", "repetitions per level"},
      {"seed", "base seed"},
      {"cap", "stratified subsample size, or 'none'"},
      {"workers", "parallel cells"},
      {"out", "output directory"},
      {"r-scale", "R"},
      {"epsilon", "epsilon"},
      {"gamma-conf", "gamma"},
      {"s0", "Beta prior successes"},
      {"f0", "Beta prior failures"},
      {"window", "SW-UCB window"},
      {"xi", "SW-UCB exploration constant"},
  };
  std::vector<std::string> values(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    run->add_option("--" + flags[i].first, values[i], flags[i].second);
  }
  bool print_config = false;
  run->add_flag("--print-config", print_config, "print the resolved settings and exit");

  // summarize ----------------------------------------------------------------
  auto* summarize_cmd = app.add_subcommand("summarize", "mean and std error per policy");
  std::string in_dir;
  bool as_csv = false;
  bool by_level = false;
  summarize_cmd->add_option("--in", in_dir, "directory of record files")->required();
  summarize_cmd->add_flag("--csv", as_csv, "CSV instead of a table");
  summarize_cmd->add_flag("--by-level", by_level, "one row per corruption level");

  // curves -------------------------------------------------------------------
  auto* curves_cmd = app.add_subcommand("curves", "per-level cumulative error curves");
  std::string curves_in;
  std::string curves_out;
  curves_cmd->add_option("--in", curves_in, "directory of record files")->required();
  curves_cmd->add_option("--out", curves_out, "output directory (default: <in>/curves)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg;
      if (!config_file.empty()) apply_settings(cfg, read_config_file(config_file));
      apply_settings(cfg, environment_settings([](const char* n) { return std::getenv(n); }));
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (run->count("--" + flags[i].first) == 0) continue;
        std::string key = flags[i].first;
        std::replace(key.begin(), key.end(), '-', '_');
        cli[key] = values[i];
      }
      apply_settings(cfg, cli);
      if (print_config) {
        std::cout << render_config(cfg);
        return 0;
      }
      cfg.validate();
      if (cfg.dataset.path.empty()) throw ConfigError("no dataset given (--dataset or dataset=)");
      const auto outputs = run_to_directory(cfg);
      for (const auto& f : outputs.record_files) std::cerr << "wrote " << f.string() << "\n";
      // Summarize one policy file at a time to bound memory.
      std::vector<SummaryRow> rows;
      for (const auto& f : outputs.record_files) {
        for (auto& r : summarize(read_records(f))) rows.push_back(std::move(r));
      }
      std::cout << format_summary_table(rows);
    } else if (*summarize_cmd) {
      const fs::path dir = in_dir;
      if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
      const auto files = record_files(dir);
      if (files.empty()) throw EmptyInput("no records_*.csv files in " + dir.string());
      if (by_level) {
        std::vector<LevelSummaryRow> rows;
        for (const auto& f : files) {
          for (auto& r : summarize_by_level(read_records(f))) rows.push_back(std::move(r));
        }
        std::cout << format_level_table(rows);
      } else {
        std::vector<SummaryRow> rows;
        for (const auto& f : files) {
          for (auto& r : summarize(read_records(f))) rows.push_back(std::move(r));
        }
        std::cout << (as_csv ? format_summary_csv(rows) : format_summary_table(rows));
      }
    } else if (*curves_cmd) {
      const fs::path out = curves_out.empty() ? fs::path(curves_in) / "curves" : fs::path(curves_out);
      for (const auto& f : emit_curves(load_records(curves_in), out)) std::cout << f.string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
