#include "cbcc/dataio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <openssl/evp.h>

#include "cbcc/errors.hpp"

namespace cbcc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::optional<double> parse_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || token.empty() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string canonical_name(std::string_view name) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  return out;
}

struct ReferenceShape {
  std::size_t rows;
  std::size_t dim;
  std::size_t classes;
};

// Instance / feature / class counts of the UCI benchmark datasets as
// published alongside the reference results.
std::optional<ReferenceShape> reference_shape(std::string_view name) {
  static const std::map<std::string, ReferenceShape> kShapes = {
      {"covertype", {581012, 95, 7}},
      {"covtype", {581012, 95, 7}},
      {"cnae9", {1080, 857, 9}},
      {"internetadvertisements", {3279, 1558, 2}},
      {"internetads", {3279, 1558, 2}},
      {"pokerhand", {1025010, 11, 9}},
  };
  const auto it = kShapes.find(canonical_name(name));
  if (it == kShapes.end()) return std::nullopt;
  return it->second;
}

void add_shape_warnings(Dataset& ds) {
  const auto ref = reference_shape(ds.name);
  if (!ref) return;
  auto check = [&](const char* what, std::size_t expected, std::size_t actual) {
    if (expected != actual) {
      ds.warnings.push_back(ds.name + ": file has " + std::to_string(actual) + " " + what +
                            ", reference table lists " + std::to_string(expected));
    }
  };
  check("instances", ref->rows, ds.rows());
  check("features", ref->dim, ds.dim());
  check("classes", ref->classes, ds.classes());
}

char detect_delimiter(std::string_view line) {
  const bool comma = line.find(',') != std::string_view::npos;
  const bool semi = line.find(';') != std::string_view::npos;
  return (semi && !comma) ? ';' : ',';
}

}  // namespace

void Dataset::validate() const {
  if (rows() == 0) throw EmptyDataset("dataset '" + name + "' has no rows");
  if (dim() == 0) throw EmptyDataset("dataset '" + name + "' has no feature columns");
  if (labels.size() != rows()) throw DataError("label count does not match row count");
  for (ArmIndex label : labels) {
    if (label >= classes()) throw DataError("label index out of range");
  }
  if (!features.allFinite()) throw DataError("dataset contains NaN or Inf");
  if (normalized && (features.minCoeff() < 0.0 || features.maxCoeff() > 1.0)) {
    throw DataError("normalized features outside [0, 1]");
  }
}

Dataset parse_delimited(std::istream& in, const DatasetSpec& spec) {
  Dataset ds;
  ds.name = spec.name.empty() ? spec.path.stem().string() : spec.name;

  std::vector<double> values;
  std::unordered_map<std::string, ArmIndex> label_index;
  char delim = spec.delimiter;
  std::size_t columns = 0;
  std::size_t label_col = 0;
  std::size_t line_no = 0;
  bool header_pending = spec.header;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (delim == '\0') delim = detect_delimiter(line);
    const auto tokens = split(line, delim);

    if (columns == 0) {
      columns = tokens.size();
      if (columns < 2) throw ParseError(line_no, 0, "need at least one feature and a label");
      label_col = spec.label_column.value_or(columns - 1);
      if (label_col >= columns) {
        throw ParseError(line_no, label_col,
                         "label column out of range for " + std::to_string(columns) +
                             " columns");
      }
    } else if (tokens.size() != columns) {
      throw ParseError(line_no, std::min(tokens.size(), columns),
                       "expected " + std::to_string(columns) + " columns, found " +
                           std::to_string(tokens.size()));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }

    for (std::size_t col = 0; col < columns; ++col) {
      if (col == label_col) continue;
      const auto value = parse_number(tokens[col]);
      if (!value) throw NonNumericFeature(line_no, col, std::string(tokens[col]));
      values.push_back(*value);
    }
    const std::string label(tokens[label_col]);
    if (label.empty()) throw ParseError(line_no, label_col, "empty label");
    auto [it, inserted] = label_index.try_emplace(label, ds.label_names.size());
    if (inserted) ds.label_names.push_back(label);
    ds.labels.push_back(it->second);
  }

  if (ds.labels.empty()) throw EmptyDataset("no data rows in '" + ds.name + "'");
  const auto n = static_cast<Eigen::Index>(ds.labels.size());
  const auto d = static_cast<Eigen::Index>(columns - 1);
  ds.features = Eigen::Map<FeatureMatrix>(values.data(), n, d);
  add_shape_warnings(ds);
  ds.validate();
  return ds;
}

Dataset load(const DatasetSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw DataError("cannot open dataset file '" + spec.path.string() + "'");
  return parse_delimited(in, spec);
}

Dataset normalize(Dataset ds) {
  const Eigen::Index d = ds.features.cols();
  Vector lo(d);
  Vector hi(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    auto col = ds.features.col(j);
    lo(j) = col.minCoeff();
    hi(j) = col.maxCoeff();
    if (hi(j) > lo(j)) {
      const double span = hi(j) - lo(j);
      col = (col.array() - lo(j)) / span;
    } else {
      col.setZero();
    }
  }
  if (!ds.normalized) {
    ds.raw_min = std::move(lo);
    ds.raw_max = std::move(hi);
    ds.normalized = true;
  }
  return ds;
}

std::pair<Vector, Vector> feature_ranges(const Dataset& ds) {
  return {ds.features.colwise().minCoeff().transpose(),
          ds.features.colwise().maxCoeff().transpose()};
}

Dataset subsample(const Dataset& ds, std::size_t cap, RngStream& rng) {
  if (cap == 0) throw InvalidParameter("subsample cap must be >= 1");
  if (ds.rows() <= cap) return ds;

  const std::size_t k = ds.classes();
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < ds.rows(); ++i) by_class[ds.labels[i]].push_back(i);

  // Largest-remainder apportionment of cap across classes.
  const double n = static_cast<double>(ds.rows());
  std::vector<std::size_t> quota(k, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = static_cast<double>(cap) * static_cast<double>(by_class[c].size()) / n;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < cap; ++i, ++assigned) ++quota[remainders[i].second];

  // Keep every class represented when the cap allows it.
  for (std::size_t c = 0; c < k; ++c) {
    if (quota[c] > 0 || by_class[c].empty()) continue;
    const auto donor = static_cast<std::size_t>(
        std::max_element(quota.begin(), quota.end()) - quota.begin());
    if (quota[donor] <= 1) break;
    --quota[donor];
    quota[c] = 1;
  }

  std::vector<std::size_t> keep;
  keep.reserve(cap);
  for (std::size_t c = 0; c < k; ++c) {
    auto& pool = by_class[c];
    for (std::size_t i = 0; i < quota[c]; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      keep.push_back(pool[i]);
    }
  }
  std::sort(keep.begin(), keep.end());

  Dataset out;
  out.name = ds.name;
  out.label_names = ds.label_names;
  out.raw_min = ds.raw_min;
  out.raw_max = ds.raw_max;
  out.normalized = ds.normalized;
  out.warnings = ds.warnings;
  out.features.resize(static_cast<Eigen::Index>(keep.size()), ds.features.cols());
  out.labels.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) =
        ds.features.row(static_cast<Eigen::Index>(keep[i]));
    out.labels.push_back(ds.labels[keep[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary cache

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'B', 'C', 'C'};

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { bytes(v, 4); }
  void u64(std::uint64_t v) { bytes(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  void bytes(std::uint64_t v, int count) {
    for (int i = 0; i < count; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::ostream& out_;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t len = u32();
    std::string s(len, '\0');
    in_.read(s.data(), len);
    if (!in_) throw DataError("truncated dataset cache");
    return s;
  }

 private:
  std::uint64_t bytes(int count) {
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) {
      const int ch = in_.get();
      if (ch == std::char_traits<char>::eof()) throw DataError("truncated dataset cache");
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(ch)) << (8 * i);
    }
    return v;
  }
  std::istream& in_;
};

}  // namespace

void write_cache(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset cache '" + path.string() + "'");
  out.write(kMagic.data(), kMagic.size());
  LeWriter w(out);
  w.u8(kCacheVersion);
  w.u64(ds.rows());
  w.u64(ds.dim());
  w.u64(ds.classes());
  w.u8(ds.normalized ? 1 : 0);
  w.str(ds.name);
  for (const auto& label : ds.label_names) w.str(label);
  for (ArmIndex label : ds.labels) w.u64(label);
  for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) w.f64(ds.features(i, j));
  }
  const bool has_ranges = ds.raw_min.size() == ds.features.cols() &&
                          ds.raw_max.size() == ds.features.cols();
  w.u8(has_ranges ? 1 : 0);
  if (has_ranges) {
    for (double v : ds.raw_min) w.f64(v);
    for (double v : ds.raw_max) w.f64(v);
  }
  if (!out) throw DataError("failed writing dataset cache '" + path.string() + "'");
}

Dataset read_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset cache '" + path.string() + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw DataError("not a CBCC dataset cache: " + path.string());
  LeReader r(in);
  const std::uint8_t version = r.u8();
  if (version != kCacheVersion) {
    throw DataError("unsupported cache version " + std::to_string(version));
  }
  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.u64();
  const std::uint64_t k = r.u64();
  Dataset ds;
  ds.normalized = r.u8() != 0;
  ds.name = r.str();
  ds.label_names.reserve(k);
  for (std::uint64_t c = 0; c < k; ++c) ds.label_names.push_back(r.str());
  ds.labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) ds.labels.push_back(r.u64());
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) ds.features(i, j) = r.f64();
  }
  if (r.u8() != 0) {
    ds.raw_min.resize(static_cast<Eigen::Index>(d));
    ds.raw_max.resize(static_cast<Eigen::Index>(d));
    for (auto& v : ds.raw_min) v = r.f64();
    for (auto& v : ds.raw_max) v = r.f64();
  }
  ds.validate();
  return ds;
}

std::string content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for hashing");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int digest_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &digest_len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < digest_len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0x0f]);
  }
  return hex;
}

}  // namespace cbcc
