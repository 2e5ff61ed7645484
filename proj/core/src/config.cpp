#include "cbcc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "cbcc/errors.hpp"

namespace cbcc {
namespace {

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (levels.empty()) throw ConfigError("at least one corruption level is required");
  for (double p : levels) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("corruption level " + format_real(p) + " is outside [0, 1]");
    }
  }
  if (rounds && *rounds == 0) throw ConfigError("rounds must be >= 1");
  if (passes == 0) throw ConfigError("passes must be >= 1");
  if (repetitions == 0) throw ConfigError("reps must be >= 1");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (cap && *cap == 0) throw ConfigError("cap must be >= 1");
  if (levels.size() >= (1ULL << 32) || repetitions >= (1ULL << 32)) {
    throw ConfigError("grid too large");
  }
  try {
    hyper.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

std::size_t ExperimentConfig::rounds_for(std::size_t dataset_rows) const {
  return rounds.value_or(passes * dataset_rows);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> kKeys = {
      "dataset", "name",   "delimiter", "label_column", "header",  "cache",
      "policy",  "levels", "rounds",    "passes",       "reps",    "seed",
      "cap",     "workers", "out",      "r_scale",      "epsilon", "gamma_conf",
      "s0",      "f0",     "window",    "xi"};
  return kKeys;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim_copy(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim_copy(std::string_view(text).substr(0, eq));
    std::string value = trim_copy(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[std::move(key)] = std::move(value);
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_key_values(in);
}

KeyValues environment_settings(const std::function<const char*(const char*)>& getenv_fn) {
  KeyValues out;
  for (const auto& key : config_keys()) {
    std::string var = "CBCC_" + key;
    std::transform(var.begin(), var.end(), var.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const char* value = getenv_fn(var.c_str()); value != nullptr) out[key] = value;
  }
  return out;
}

void apply_settings(ExperimentConfig& cfg, const KeyValues& settings) {
  for (const auto& [key, value] : settings) {
    if (key == "dataset") {
      cfg.dataset.path = value;
    } else if (key == "name") {
      cfg.dataset.name = value;
    } else if (key == "delimiter") {
      if (value == "auto") cfg.dataset.delimiter = '\0';
      else if (value == "," || value == "comma") cfg.dataset.delimiter = ',';
      else if (value == ";" || value == "semicolon") cfg.dataset.delimiter = ';';
      else throw ConfigError("delimiter: expected ',', ';' or auto, got '" + value + "'");
    } else if (key == "label_column") {
      if (value == "last") cfg.dataset.label_column.reset();
      else cfg.dataset.label_column = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "header") {
      cfg.dataset.header = to_bool(key, value);
    } else if (key == "cache") {
      if (value.empty()) cfg.cache.reset();
      else cfg.cache = value;
    } else if (key == "policy") {
      cfg.policies.clear();
      for (const auto& name : split_list(value)) {
        if (name == "all") {
          cfg.policies = {PolicyKind::kMab, PolicyKind::kNsmab, PolicyKind::kCmab,
                          PolicyKind::kTscc};
          continue;
        }
        try {
          cfg.policies.push_back(parse_policy_kind(name));
        } catch (const InvalidParameter& e) {
          throw ConfigError(e.what());
        }
      }
    } else if (key == "levels") {
      cfg.levels.clear();
      for (const auto& item : split_list(value)) cfg.levels.push_back(to_real(key, item));
    } else if (key == "rounds") {
      if (value == "auto") cfg.rounds.reset();
      else cfg.rounds = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "passes") {
      cfg.passes = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "reps") {
      cfg.repetitions = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "seed") {
      cfg.seed = to_unsigned(key, value);
    } else if (key == "cap") {
      if (value == "none" || value.empty()) cfg.cap.reset();
      else cfg.cap = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "workers") {
      cfg.workers = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "r_scale") {
      cfg.hyper.r_scale = to_real(key, value);
    } else if (key == "epsilon") {
      cfg.hyper.epsilon = to_real(key, value);
    } else if (key == "gamma_conf") {
      cfg.hyper.gamma_conf = to_real(key, value);
    } else if (key == "s0") {
      cfg.hyper.s0 = to_real(key, value);
    } else if (key == "f0") {
      cfg.hyper.f0 = to_real(key, value);
    } else if (key == "window") {
      cfg.hyper.window = static_cast<std::size_t>(to_unsigned(key, value));
    } else if (key == "xi") {
      cfg.hyper.xi = to_real(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "dataset=" << cfg.dataset.path.string() << '\n';
  out << "name=" << cfg.dataset.name << '\n';
  out << "delimiter="
      << (cfg.dataset.delimiter == '\0' ? std::string("auto")
                                        : std::string(1, cfg.dataset.delimiter))
      << '\n';
  out << "label_column="
      << (cfg.dataset.label_column ? std::to_string(*cfg.dataset.label_column) : "last")
      << '\n';
  out << "header=" << (cfg.dataset.header ? "true" : "false") << '\n';
  out << "cache=" << (cfg.cache ? cfg.cache->string() : "") << '\n';
  out << "policy=";
  for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
    out << (i ? "," : "") << to_string(cfg.policies[i]);
  }
  out << '\n';
  out << "levels=";
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    out << (i ? "," : "") << format_real(cfg.levels[i]);
  }
  out << '\n';
  out << "rounds=" << (cfg.rounds ? std::to_string(*cfg.rounds) : "auto") << '\n';
  out << "passes=" << cfg.passes << '\n';
  out << "reps=" << cfg.repetitions << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "cap=" << (cfg.cap ? std::to_string(*cfg.cap) : "none") << '\n';
  out << "workers=" << cfg.workers << '\n';
  out << "out=" << cfg.out.string() << '\n';
  out << "r_scale=" << format_real(cfg.hyper.r_scale) << '\n';
  out << "epsilon=" << format_real(cfg.hyper.epsilon) << '\n';
  out << "gamma_conf=" << format_real(cfg.hyper.gamma_conf) << '\n';
  out << "s0=" << format_real(cfg.hyper.s0) << '\n';
  out << "f0=" << format_real(cfg.hyper.f0) << '\n';
  out << "window=" << cfg.hyper.window << '\n';
  out << "xi=" << format_real(cfg.hyper.xi) << '\n';
  return out.str();
}

}  // namespace cbcc
