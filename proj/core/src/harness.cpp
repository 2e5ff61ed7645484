#include "cbcc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "cbcc/environment.hpp"
#include "cbcc/errors.hpp"

namespace cbcc {
namespace {

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

// Final error percentage of every cell, keyed by (dataset, policy, run).
struct CellOutcome {
  double p_corrupt = 0.0;
  std::size_t rounds = 0;
  std::size_t errors = 0;
};
using CellKey = std::tuple<std::string, int, std::uint64_t>;

std::map<CellKey, CellOutcome> collect_cells(const std::vector<RoundRecord>& records) {
  if (records.empty()) throw EmptyInput("no round records to summarize");
  std::map<CellKey, CellOutcome> cells;
  for (const auto& r : records) {
    auto& cell = cells[{r.dataset, static_cast<int>(r.policy), r.run}];
    cell.p_corrupt = r.p_corrupt;
    cell.rounds = std::max(cell.rounds, r.t);
    cell.errors = std::max(cell.errors, r.cumulative_error);
  }
  return cells;
}

double cell_error_pct(const CellOutcome& c) {
  return c.rounds == 0 ? 0.0
                       : 100.0 * static_cast<double>(c.errors) / static_cast<double>(c.rounds);
}

}  // namespace

std::shared_ptr<const Dataset> prepare_dataset(const ExperimentConfig& cfg) {
  Dataset ds;
  if (cfg.cache && std::filesystem::exists(*cfg.cache)) {
    ds = read_cache(*cfg.cache);
  } else {
    ds = normalize(load(cfg.dataset));
    if (cfg.cache) write_cache(ds, *cfg.cache);
  }
  if (cfg.cap && ds.rows() > *cfg.cap) {
    RngStream rng = RngStream(cfg.seed).derive("subsample");
    const std::size_t source_rows = ds.rows();
    ds = subsample(ds, *cfg.cap, rng);
    ds.warnings.push_back("stratified subsample: " + std::to_string(ds.rows()) + " of " +
                          std::to_string(source_rows) + " rows");
  }
  return std::make_shared<const Dataset>(std::move(ds));
}

std::vector<CellSpec> grid_cells(const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  cells.reserve(cfg.levels.size() * cfg.repetitions);
  for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
      cells.push_back({l, r, cfg.levels[l], static_cast<std::uint64_t>(l * cfg.repetitions + r)});
    }
  }
  return cells;
}

RngStream cell_stream(std::uint64_t base_seed, const CellSpec& cell) {
  const std::uint64_t key = (static_cast<std::uint64_t>(cell.level_index) << 32) |
                            static_cast<std::uint64_t>(cell.repetition & 0xffffffffULL);
  return RngStream(base_seed).derive("cell", key);
}

CellResult run_cell(const ExperimentConfig& cfg, std::shared_ptr<const Dataset> dataset,
                    PolicyKind policy_kind, const CellSpec& cell, const RecordSink& sink) {
  const RngStream stream = cell_stream(cfg.seed, cell);
  const std::size_t arms = dataset->classes();
  const std::size_t dim = dataset->dim();
  const std::string name = dataset->name;
  Environment env(dataset, make_corruption(*dataset, cell.p_corrupt, stream.derive("environment")));
  auto policy = make_policy(policy_kind, arms, dim, cfg.hyper);
  RngStream policy_rng = stream.derive("policy");

  CellResult result{cell, cfg.rounds_for(dataset->rows()), 0};
  RoundRecord record;
  record.dataset = name;
  record.run = cell.run;
  record.level_index = cell.level_index;
  record.repetition = cell.repetition;
  record.policy = policy_kind;
  record.p_corrupt = cell.p_corrupt;

  for (std::size_t t = 1; t <= result.rounds; ++t) {
    const BanditRound& round = env.next_round();
    const Decision decision = policy->select(round.presented_context, policy_rng);
    const int reward = env.step(decision.arm);
    policy->update(round.presented_context, decision, reward);
    result.errors += static_cast<std::size_t>(1 - reward);
    if (sink) {
      record.t = round.t;
      record.arm = decision.arm;
      record.reward = reward;
      record.was_corrupted = round.was_corrupted;
      record.alpha = decision.alpha;
      record.cumulative_error = result.errors;
      sink(record);
    }
  }
  return result;
}

std::vector<CellResult> run_cells(const ExperimentConfig& cfg,
                                  std::shared_ptr<const Dataset> dataset, PolicyKind policy,
                                  const std::function<RecordSink(const CellSpec&)>& make_sink) {
  cfg.validate();
  const auto cells = grid_cells(cfg);
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const RecordSink sink = make_sink ? make_sink(cells[i]) : RecordSink{};
        results[i] = run_cell(cfg, dataset, policy, cells[i], sink);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cells.size());
      }
    }
  };

  const std::size_t threads = std::min(cfg.workers, cells.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<RoundRecord> run_experiment(const ExperimentConfig& cfg,
                                        std::shared_ptr<const Dataset> dataset,
                                        PolicyKind policy) {
  const auto cells = grid_cells(cfg);
  std::vector<std::vector<RoundRecord>> per_cell(cells.size());
  run_cells(cfg, dataset, policy, [&](const CellSpec& cell) -> RecordSink {
    auto* bucket = &per_cell[cell.run];
    bucket->reserve(cfg.rounds_for(dataset->rows()));
    return [bucket](const RoundRecord& r) { bucket->push_back(r); };
  });
  std::vector<RoundRecord> all;
  for (auto& bucket : per_cell) {
    all.insert(all.end(), std::make_move_iterator(bucket.begin()),
               std::make_move_iterator(bucket.end()));
  }
  return all;
}

// ---------------------------------------------------------------------------
// Record files

std::string record_header() {
  return "dataset,policy,run,level_index,repetition,p_corrupt,t,arm,reward,corrupted,alpha,"
         "cumulative_error";
}

std::string format_record(const RoundRecord& r) {
  std::string line;
  line.reserve(64);
  line += r.dataset;
  line += ',';
  line += to_string(r.policy);
  line += ',';
  line += std::to_string(r.run);
  line += ',';
  line += std::to_string(r.level_index);
  line += ',';
  line += std::to_string(r.repetition);
  line += ',';
  line += format_real(r.p_corrupt);
  line += ',';
  line += std::to_string(r.t);
  line += ',';
  line += std::to_string(r.arm);
  line += ',';
  line += std::to_string(r.reward);
  line += ',';
  line += r.was_corrupted ? '1' : '0';
  line += ',';
  line += std::to_string(r.alpha);
  line += ',';
  line += std::to_string(r.cumulative_error);
  return line;
}

void write_records(std::ostream& out, const std::vector<RoundRecord>& records) {
  out << record_header() << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
}

namespace {

template <typename T>
T parse_field(std::string_view token, std::size_t line_no, std::size_t col) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line_no, col, "bad record field '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::vector<RoundRecord> read_records(std::istream& in) {
  std::vector<RoundRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == record_header()) continue;
    fields.clear();
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 12) {
      throw ParseError(line_no, fields.size(), "expected 12 record fields");
    }
    RoundRecord r;
    r.dataset = std::string(fields[0]);
    try {
      r.policy = parse_policy_kind(fields[1]);
    } catch (const InvalidParameter&) {
      throw ParseError(line_no, 1, "unknown policy '" + std::string(fields[1]) + "'");
    }
    r.run = parse_field<std::uint64_t>(fields[2], line_no, 2);
    r.level_index = parse_field<std::size_t>(fields[3], line_no, 3);
    r.repetition = parse_field<std::size_t>(fields[4], line_no, 4);
    r.p_corrupt = parse_field<double>(fields[5], line_no, 5);
    r.t = parse_field<std::size_t>(fields[6], line_no, 6);
    r.arm = parse_field<std::size_t>(fields[7], line_no, 7);
    r.reward = parse_field<int>(fields[8], line_no, 8);
    r.was_corrupted = parse_field<int>(fields[9], line_no, 9) != 0;
    r.alpha = parse_field<int>(fields[10], line_no, 10);
    r.cumulative_error = parse_field<std::size_t>(fields[11], line_no, 11);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RoundRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open record file '" + path.string() + "'");
  return read_records(in);
}

// ---------------------------------------------------------------------------
// Summaries

std::vector<SummaryRow> summarize(const std::vector<RoundRecord>& records) {
  const auto cells = collect_cells(records);
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& [key, cell] : cells) {
    groups[{std::get<0>(key), std::get<1>(key)}].push_back(cell_error_pct(cell));
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, errs] : groups) {
    const auto ms = mean_std(errs);
    rows.push_back({key.first, static_cast<PolicyKind>(key.second), ms.mean, ms.std, errs.size()});
  }
  return rows;
}

std::vector<LevelSummaryRow> summarize_by_level(const std::vector<RoundRecord>& records) {
  const auto cells = collect_cells(records);
  std::map<std::tuple<std::string, int, double>, std::vector<double>> groups;
  for (const auto& [key, cell] : cells) {
    groups[{std::get<0>(key), std::get<1>(key), cell.p_corrupt}].push_back(cell_error_pct(cell));
  }
  std::vector<LevelSummaryRow> rows;
  for (const auto& [key, errs] : groups) {
    const auto ms = mean_std(errs);
    rows.push_back({std::get<0>(key), static_cast<PolicyKind>(std::get<1>(key)), std::get<2>(key),
                    ms.mean, ms.std, errs.size()});
  }
  return rows;
}

std::vector<Curve> build_curves(const std::vector<RoundRecord>& records) {
  struct Acc {
    std::vector<double> sum;
    std::vector<std::size_t> count;
  };
  std::map<std::pair<std::string, double>, std::map<int, Acc>> acc;
  for (const auto& r : records) {
    if (r.t == 0) continue;
    auto& a = acc[{r.dataset, r.p_corrupt}][static_cast<int>(r.policy)];
    if (a.sum.size() < r.t) {
      a.sum.resize(r.t, 0.0);
      a.count.resize(r.t, 0);
    }
    a.sum[r.t - 1] += static_cast<double>(r.cumulative_error);
    a.count[r.t - 1] += 1;
  }
  std::vector<Curve> curves;
  for (const auto& [key, by_policy] : acc) {
    Curve curve{key.first, key.second, {}};
    for (const auto& [policy, a] : by_policy) {
      for (std::size_t i = 0; i < a.sum.size(); ++i) {
        if (a.count[i] == 0) continue;
        curve.points.push_back({i + 1, static_cast<PolicyKind>(policy),
                                a.sum[i] / static_cast<double>(a.count[i])});
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> emit_curves(const std::vector<RoundRecord>& records,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (const auto& curve : build_curves(records)) {
    std::ostringstream out;
    out << "t,policy,mean_cumulative_error\n";
    for (const auto& pt : curve.points) {
      out << pt.t << ',' << to_string(pt.policy) << ',' << format_real(pt.mean_cumulative_error)
          << '\n';
    }
    const auto path = dir / ("curve_" + curve.dataset + "_p" + format_real(curve.p_corrupt) + ".csv");
    write_atomically(path, out.str());
    files.push_back(path);
  }
  return files;
}

RunOutputs run_to_directory(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dataset = prepare_dataset(cfg);
  std::filesystem::create_directories(cfg.out);
  const std::string hash = std::filesystem::exists(cfg.dataset.path)
                               ? content_hash(cfg.dataset.path)
                               : std::string("unavailable");
  RunOutputs outputs;

  for (PolicyKind policy : cfg.policies) {
    const std::string stem = dataset->name + "_" + std::string(to_string(policy));
    const auto parts_dir = cfg.out / (".parts_" + stem);
    std::filesystem::create_directories(parts_dir);
    auto part_path = [&](const CellSpec& cell) {
      return parts_dir / ("cell_" + std::to_string(cell.run) + ".csv");
    };

    const auto results = run_cells(cfg, dataset, policy, [&](const CellSpec& cell) -> RecordSink {
      auto out = std::make_shared<std::ofstream>(part_path(cell), std::ios::binary | std::ios::trunc);
      if (!*out) throw DataError("cannot write '" + part_path(cell).string() + "'");
      return [out](const RoundRecord& r) { *out << format_record(r) << '\n'; };
    });

    // Single writer merges the per-cell parts in grid order.
    const auto records_path = cfg.out / ("records_" + stem + ".csv");
    auto tmp = records_path;
    tmp += ".tmp";
    {
      std::ofstream merged(tmp, std::ios::binary | std::ios::trunc);
      if (!merged) throw DataError("cannot write '" + tmp.string() + "'");
      merged << record_header() << '\n';
      for (const auto& cell : grid_cells(cfg)) {
        std::ifstream part(part_path(cell), std::ios::binary);
        merged << part.rdbuf();
      }
      if (!merged) throw DataError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, records_path);
    std::filesystem::remove_all(parts_dir);

    std::ostringstream meta;
    meta << render_config(cfg);
    meta << "run_policy=" << to_string(policy) << '\n';
    meta << "dataset_name=" << dataset->name << '\n';
    meta << "dataset_hash=" << hash << '\n';
    meta << "dataset_rows=" << dataset->rows() << '\n';
    meta << "dataset_dim=" << dataset->dim() << '\n';
    meta << "dataset_classes=" << dataset->classes() << '\n';
    meta << "rounds_per_cell=" << cfg.rounds_for(dataset->rows()) << '\n';
    meta << "cells=" << results.size() << '\n';
    for (const auto& w : dataset->warnings) meta << "warning=" << w << '\n';
    const auto meta_path = cfg.out / ("run_" + stem + ".meta");
    write_atomically(meta_path, meta.str());

    outputs.record_files.push_back(records_path);
    outputs.metadata_files.push_back(meta_path);
  }
  return outputs;
}

std::vector<RoundRecord> read_record_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("records_") && name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RoundRecord> all;
  for (const auto& f : files) {
    auto part = read_records(f);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return all;
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "dataset" << std::setw(8) << "policy" << std::right
      << std::setw(10) << "error%" << std::setw(10) << "std" << std::setw(8) << "cells" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(28) << r.dataset << std::setw(8) << to_string(r.policy)
        << std::right << std::fixed << std::setprecision(2) << std::setw(10) << r.mean_error_pct
        << std::setw(10) << r.std_error_pct << std::setw(8) << r.cells << '\n';
  }
  return out.str();
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "dataset,policy,mean_error_pct,std_error_pct,cells\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << to_string(r.policy) << ',' << format_real(r.mean_error_pct) << ','
        << format_real(r.std_error_pct) << ',' << r.cells << '\n';
  }
  return out.str();
}

}  // namespace cbcc
