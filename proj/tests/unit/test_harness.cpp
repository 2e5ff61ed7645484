#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cbcc/errors.hpp"
#include "cbcc/harness.hpp"
#include "synthetic.hpp"

namespace cbcc {
namespace {

namespace fs = std::filesystem;

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("cbcc_harness_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const Dataset ds = testing::make_topic_dataset(60, 12, 3, 11, 0.35, 0.03, "topics");
    data_path_ = dir_ / "topics.csv";
    std::ofstream out(data_path_);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      for (std::size_t j = 0; j < ds.dim(); ++j) {
        out << ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << ',';
      }
      out << ds.label_names[ds.labels[i]] << '\n';
    }
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExperimentConfig config() const {
    ExperimentConfig cfg;
    cfg.dataset.path = data_path_;
    cfg.levels = {0.0, 0.5, 1.0};
    cfg.repetitions = 2;
    cfg.rounds = 150;
    cfg.seed = 7;
    cfg.out = dir_ / "out";
    return cfg;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  fs::path data_path_;
};

TEST_F(HarnessTest, GridCellsAreLevelMajor) {
  const auto cells = grid_cells(config());
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[1].level_index, 0u);
  EXPECT_EQ(cells[1].repetition, 1u);
  EXPECT_EQ(cells[2].level_index, 1u);
  EXPECT_EQ(cells[5].p_corrupt, 1.0);
  for (std::size_t i = 0; i < cells.size(); ++i) EXPECT_EQ(cells[i].run, i);
}

TEST_F(HarnessTest, CellStreamsAreDistinct) {
  ExperimentConfig cfg = config();
  cfg.levels.assign(20, 0.5);
  cfg.repetitions = 20;
  std::set<std::uint64_t> seeds;
  for (const auto& cell : grid_cells(cfg)) seeds.insert(cell_stream(cfg.seed, cell).seed());
  EXPECT_EQ(seeds.size(), 400u);
}

TEST_F(HarnessTest, RecordsAreWellFormed) {
  const auto cfg = config();
  const auto ds = prepare_dataset(cfg);
  for (PolicyKind k : {PolicyKind::kMab, PolicyKind::kNsmab, PolicyKind::kCmab,
                       PolicyKind::kTscc}) {
    const auto records = run_experiment(cfg, ds, k);
    ASSERT_EQ(records.size(), 6u * 150u);
    std::size_t prev_err = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      ASSERT_EQ(r.t, i % 150 + 1);
      if (r.t == 1) prev_err = 0;
      ASSERT_TRUE(r.reward == 0 || r.reward == 1);
      ASSERT_EQ(r.cumulative_error, prev_err + static_cast<std::size_t>(1 - r.reward));
      prev_err = r.cumulative_error;
      if (k == PolicyKind::kTscc) {
        ASSERT_TRUE(r.alpha == 0 || r.alpha == 1);
      } else {
        ASSERT_EQ(r.alpha, -1);
      }
      if (r.p_corrupt == 0.0) ASSERT_FALSE(r.was_corrupted);
      if (r.p_corrupt == 1.0) ASSERT_TRUE(r.was_corrupted);
      ASSERT_EQ(r.run, r.level_index * 2 + r.repetition);
    }
  }
}

TEST_F(HarnessTest, ZeroRoundsRejected) {
  auto cfg = config();
  cfg.rounds = 0;
  EXPECT_THROW(run_experiment(cfg, prepare_dataset(config()), PolicyKind::kMab), ConfigError);
}

// MAB never reads the context, so a level's records do not depend on p.
TEST_F(HarnessTest, MabIgnoresCorruptionLevel) {
  auto cfg = config();
  const auto ds = prepare_dataset(cfg);
  std::vector<std::vector<RoundRecord>> runs;
  for (double p : {0.0, 0.3, 1.0}) {
    cfg.levels = {p};
    runs.push_back(run_experiment(cfg, ds, PolicyKind::kMab));
  }
  for (std::size_t i = 1; i < runs.size(); ++i) {
    ASSERT_EQ(runs[i].size(), runs[0].size());
    for (std::size_t j = 0; j < runs[0].size(); ++j) {
      ASSERT_EQ(runs[i][j].arm, runs[0][j].arm);
      ASSERT_EQ(runs[i][j].reward, runs[0][j].reward);
      ASSERT_EQ(runs[i][j].cumulative_error, runs[0][j].cumulative_error);
    }
  }
}

TEST_F(HarnessTest, WorkerCountDoesNotChangeResults) {
  auto cfg = config();
  const auto ds = prepare_dataset(cfg);
  const auto serial = run_experiment(cfg, ds, PolicyKind::kTscc);
  cfg.workers = 4;
  EXPECT_EQ(run_experiment(cfg, ds, PolicyKind::kTscc), serial);
}

TEST_F(HarnessTest, RecordFileRoundTrip) {
  const auto cfg = config();
  const auto records = run_experiment(cfg, prepare_dataset(cfg), PolicyKind::kTscc);
  std::stringstream buf;
  write_records(buf, records);
  EXPECT_EQ(read_records(buf), records);
}

TEST_F(HarnessTest, ReadRecordsRejectsGarbage) {
  std::stringstream bad(record_header() + "\nx,tscc,0,0,0,0.5,1,0,1,0\n");
  EXPECT_THROW(read_records(bad), ParseError);
  std::stringstream bad_policy(record_header() + "\nx,ucb,0,0,0,0.5,1,0,1,0,-1,0\n");
  EXPECT_THROW(read_records(bad_policy), ParseError);
}

TEST_F(HarnessTest, RunToDirectoryIsByteIdentical) {
  auto cfg = config();
  cfg.policies = {PolicyKind::kMab, PolicyKind::kTscc};
  const auto first = run_to_directory(cfg);
  std::vector<std::string> bytes;
  for (const auto& f : first.record_files) bytes.push_back(slurp(f));
  cfg.workers = 3;
  const auto second = run_to_directory(cfg);
  ASSERT_EQ(second.record_files.size(), bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    EXPECT_EQ(slurp(second.record_files[i]), bytes[i]);
  }
  for (const auto& entry : fs::directory_iterator(cfg.out)) {
    const auto name = entry.path().filename().string();
    EXPECT_FALSE(name.ends_with(".tmp")) << name;
    EXPECT_FALSE(name.starts_with(".parts_")) << name;
  }
}

TEST_F(HarnessTest, MetadataEchoesConfigAndHash) {
  auto cfg = config();
  cfg.cap = 30;
  const auto out = run_to_directory(cfg);
  const std::string meta = slurp(out.metadata_files.at(0));
  EXPECT_NE(meta.find("seed=7\n"), std::string::npos);
  EXPECT_NE(meta.find("dataset_hash=" + content_hash(data_path_) + "\n"), std::string::npos);
  EXPECT_NE(meta.find("dataset_rows=30\n"), std::string::npos);
  EXPECT_NE(meta.find("warning=stratified subsample: 30 of 60 rows"), std::string::npos);
  EXPECT_NE(meta.find("rounds_per_cell=150\n"), std::string::npos);
}

TEST_F(HarnessTest, CacheIsWrittenAndReused) {
  auto cfg = config();
  cfg.cache = dir_ / "topics.cbcc";
  const auto a = prepare_dataset(cfg);
  ASSERT_TRUE(fs::exists(*cfg.cache));
  const auto b = prepare_dataset(cfg);
  EXPECT_EQ(a->features, b->features);
  EXPECT_EQ(a->labels, b->labels);
}

TEST_F(HarnessTest, ReadRecordDirectory) {
  auto cfg = config();
  cfg.policies = {PolicyKind::kMab, PolicyKind::kCmab};
  run_to_directory(cfg);
  const auto records = read_record_directory(cfg.out);
  EXPECT_EQ(records.size(), 2u * 6u * 150u);
  EXPECT_THROW(read_record_directory(dir_ / "nope"), DataError);
}

// ---------------------------------------------------------------------------

RoundRecord rec(PolicyKind k, std::uint64_t run, double p, std::size_t t, std::size_t err) {
  RoundRecord r;
  r.dataset = "d";
  r.policy = k;
  r.run = run;
  r.p_corrupt = p;
  r.t = t;
  r.cumulative_error = err;
  return r;
}

TEST(Summarize, SingleCellRatioAndZeroStd) {
  std::vector<RoundRecord> records;
  for (std::size_t t = 1; t <= 100; ++t) {
    records.push_back(rec(PolicyKind::kTscc, 0, 0.5, t, t <= 40 ? t : 40));
  }
  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean_error_pct, 40.0);
  EXPECT_EQ(rows[0].std_error_pct, 0.0);
  EXPECT_EQ(rows[0].cells, 1u);
}

TEST(Summarize, SampleStdAcrossCells) {
  std::vector<RoundRecord> records{rec(PolicyKind::kMab, 0, 0.1, 10, 2),
                                   rec(PolicyKind::kMab, 1, 0.1, 10, 4),
                                   rec(PolicyKind::kMab, 2, 0.9, 10, 6)};
  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean_error_pct, 40.0);
  EXPECT_NEAR(rows[0].std_error_pct, 20.0, 1e-12);
  const auto levels = summarize_by_level(records);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_DOUBLE_EQ(levels[0].mean_error_pct, 30.0);
  EXPECT_DOUBLE_EQ(levels[1].mean_error_pct, 60.0);
}

TEST(Summarize, EmptyThrows) {
  EXPECT_THROW(summarize({}), EmptyInput);
  EXPECT_THROW(summarize_by_level({}), EmptyInput);
}

TEST(Summarize, OrderInvariant) {
  RngStream rng(1);
  std::vector<RoundRecord> records;
  for (std::uint64_t run = 0; run < 6; ++run) {
    std::size_t err = 0;
    for (std::size_t t = 1; t <= 50; ++t) {
      err += rng.uniform() < 0.3;
      records.push_back(rec(run % 2 ? PolicyKind::kCmab : PolicyKind::kTscc, run,
                            0.25 * static_cast<double>(run / 2), t, err));
    }
  }
  const auto base = summarize(records);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = records.size(); i > 1; --i) {
      std::swap(records[i - 1], records[static_cast<std::size_t>(rng.below(i))]);
    }
    const auto again = summarize(records);
    ASSERT_EQ(again.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      ASSERT_EQ(again[i].mean_error_pct, base[i].mean_error_pct);
      ASSERT_EQ(again[i].std_error_pct, base[i].std_error_pct);
    }
  }
}

TEST_F(HarnessTest, CurvesAgreeWithSummaries) {
  auto cfg = config();
  cfg.repetitions = 3;
  auto records = run_experiment(cfg, prepare_dataset(cfg), PolicyKind::kTscc);
  const auto more = run_experiment(cfg, prepare_dataset(cfg), PolicyKind::kMab);
  records.insert(records.end(), more.begin(), more.end());
  const auto curves = build_curves(records);
  ASSERT_EQ(curves.size(), 3u);
  const auto levels = summarize_by_level(records);
  for (const auto& curve : curves) {
    std::map<PolicyKind, double> last;
    std::map<PolicyKind, double> prev;
    for (const auto& pt : curve.points) {
      if (prev.count(pt.policy)) EXPECT_GE(pt.mean_cumulative_error, prev[pt.policy]);
      prev[pt.policy] = pt.mean_cumulative_error;
      if (pt.t == 150) last[pt.policy] = pt.mean_cumulative_error;
    }
    for (const auto& row : levels) {
      if (row.p_corrupt != curve.p_corrupt) continue;
      EXPECT_NEAR(last.at(row.policy), row.mean_error_pct / 100.0 * 150.0, 1e-9);
    }
  }
  const auto files = emit_curves(records, dir_ / "curves");
  EXPECT_EQ(files.size(), 3u);
  const std::string text = slurp(files.front());
  EXPECT_EQ(text.rfind("t,policy,mean_cumulative_error\n", 0), 0u);
}

TEST(FormatSummary, TableAndCsv) {
  const std::vector<SummaryRow> rows{{"cnae9", PolicyKind::kTscc, 70.5, 1.25, 50}};
  const auto table = format_summary_table(rows);
  EXPECT_NE(table.find("70.50"), std::string::npos);
  EXPECT_NE(table.find("1.25"), std::string::npos);
  EXPECT_EQ(format_summary_csv(rows),
            "dataset,policy,mean_error_pct,std_error_pct,cells\ncnae9,tscc,70.5,1.25,50\n");
}

}  // namespace
}  // namespace cbcc
