#include "lrd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lrd {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as a number");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as an integer");
  }
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    if (cfg.kv_.count(key) != 0) {
      throw ConfigError("config key '" + key + "' appears twice");
    }
    cfg.kv_[key] = value;
    cfg.order_.push_back(key);
  }
  return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string KvConfig::serialize() const {
  std::string out;
  for (const auto& k : order_) {
    out += k;
    out += " = ";
    out += kv_.at(k);
    out += '\n';
  }
  return out;
}

bool KvConfig::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string KvConfig::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string KvConfig::get_string(const std::string& key,
                                 const std::string& dflt) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double KvConfig::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

double KvConfig::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

std::int64_t KvConfig::get_int(const std::string& key) const {
  return parse_int(key, get_string(key));
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? get_int(key) : dflt;
}

std::uint64_t KvConfig::get_uint(const std::string& key, std::uint64_t dflt) const {
  if (!has(key)) return dflt;
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as an unsigned integer");
  }
}

std::vector<double> KvConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_string(key))) {
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::vector<std::int64_t> KvConfig::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(get_string(key))) {
    out.push_back(parse_int(key, item));
  }
  return out;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  if (kv_.count(key) == 0) order_.push_back(key);
  kv_[key] = value;
}

void KvConfig::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

void KvConfig::set_int(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}

void KvConfig::set_double_list(const std::string& key,
                               const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(v[i]);
  }
  set(key, s);
}

void KvConfig::expect_keys(const std::vector<std::string>& allowed) const {
  for (const auto& k : order_) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
}

bool KvConfig::operator==(const KvConfig& other) const {
  return kv_ == other.kv_ && order_ == other.order_;
}

CovarianceModel model_from_config(const KvConfig& cfg) {
  const std::string family = cfg.get_string("family");
  const double sigma2 = cfg.get_double("sigma2", 1.0);
  if (family == "farima0d0") {
    return CovarianceModel::farima0d0(cfg.get_double("d"), sigma2);
  }
  if (family == "farima") {
    std::vector<double> ar =
        cfg.has("ar") ? cfg.get_double_list("ar") : std::vector<double>{};
    std::vector<double> ma =
        cfg.has("ma") ? cfg.get_double_list("ma") : std::vector<double>{};
    return CovarianceModel::farima(cfg.get_double("d"), std::move(ar),
                                   std::move(ma), sigma2,
                                   cfg.get_int("trunc", 0));
  }
  if (family == "fgn") {
    return CovarianceModel::fgn(cfg.get_double("hurst"), sigma2);
  }
  if (family == "product") {
    return CovarianceModel::product(cfg.get_double("d"),
                                    cfg.get_double_list("gamma0"));
  }
  throw ConfigError("unknown model family '" + family +
                    "' (expected farima0d0, farima, fgn or product)");
}

KvConfig model_to_config(const CovarianceModel& model) {
  KvConfig cfg;
  cfg.set("family", model.family());
  if (model.family() == "fgn") {
    cfg.set_double("hurst", model.memory_d() + 0.5);
  } else {
    cfg.set_double("d", model.memory_d());
  }
  if (model.family() != "product") cfg.set_double("sigma2", model.sigma2());
  if (model.family() == "farima") {
    if (!model.ar().empty()) cfg.set_double_list("ar", model.ar());
    if (!model.ma().empty()) cfg.set_double_list("ma", model.ma());
  }
  if (model.family() == "product") cfg.set_double_list("gamma0", model.gamma0());
  return cfg;
}

std::function<std::int64_t(std::int64_t)> block_rule_from_string(
    const std::string& spec) {
  if (spec == "sqrt") {
    return [](std::int64_t n) {
      return static_cast<std::int64_t>(
          std::ceil(std::sqrt(static_cast<double>(n))));
    };
  }
  if (spec.rfind("pow:", 0) == 0) {
    const double a = parse_double("block rule", spec.substr(4));
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigError("block rule pow:a needs 0 < a < 1");
    }
    return [a](std::int64_t n) {
      return static_cast<std::int64_t>(
          std::ceil(std::pow(static_cast<double>(n), a)));
    };
  }
  const std::int64_t fixed = parse_int("block rule", spec);
  if (fixed < 1) throw ConfigError("fixed block size must be >= 1");
  return [fixed](std::int64_t) { return fixed; };
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string cell_to_string(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) {
    return std::to_string(std::get<std::int64_t>(c));
  }
  if (std::holds_alternative<double>(c)) {
    return format_double(std::get<double>(c));
  }
  return std::get<std::string>(c);
}

void check_writable(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError("refusing to overwrite existing file " + path +
                  " (pass --force)");
  }
}

}  // namespace

void write_csv(const std::string& path, const OutputTable& table, bool force) {
  check_writable(path, force);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& note : table.notes) out << "# " << note << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << cell_to_string(row[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_json(const std::string& path, const OutputTable& table, bool force) {
  check_writable(path, force);
  nlohmann::ordered_json j;
  j["notes"] = table.notes;
  j["columns"] = table.columns;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      const Cell& cell = row[c];
      if (std::holds_alternative<std::int64_t>(cell)) {
        arr.push_back(std::get<std::int64_t>(cell));
      } else if (std::holds_alternative<double>(cell)) {
        const double v = std::get<double>(cell);
        if (std::isfinite(v)) {
          arr.push_back(v);
        } else {
          arr.push_back(nullptr);
        }
      } else {
        arr.push_back(std::get<std::string>(cell));
      }
    }
    j[table.columns[c]] = std::move(arr);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file: " + path);
  std::vector<double> out;
  std::string line;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(t, &pos);
      out.push_back(v);
      header_allowed = false;
      (void)pos;
    } catch (const std::exception&) {
      if (header_allowed) {
        header_allowed = false;
        continue;  // one non-numeric header line
      }
      throw IoError("series file " + path + ": cannot parse line '" + t + "'");
    }
  }
  if (out.empty()) throw IoError("series file " + path + " holds no values");
  return out;
}

std::string resolve_output_path(const std::string& path) {
  const char* dir = std::getenv("LRD_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

}  // namespace lrd
