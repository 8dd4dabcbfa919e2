#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "lrd/models.hpp"

namespace lrd {

/// Flat key = value config with '#' comments. Keys keep insertion order so
/// parse -> serialize -> parse is the identity.
class KvConfig {
 public:
  static KvConfig parse(const std::string& text);
  static KvConfig load(const std::string& path);
  std::string serialize() const;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t dflt) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, std::int64_t value);
  void set_double_list(const std::string& key, const std::vector<double>& v);

  const std::vector<std::string>& keys() const { return order_; }
  /// Rejects keys outside the allowed set, naming the offender.
  void expect_keys(const std::vector<std::string>& allowed) const;

  bool operator==(const KvConfig& other) const;

 private:
  std::map<std::string, std::string> kv_;
  std::vector<std::string> order_;
};

/// Model <-> config. Keys: family (farima0d0|farima|fgn|product), d or
/// hurst, sigma2, ar, ma, gamma0, trunc.
CovarianceModel model_from_config(const KvConfig& cfg);
KvConfig model_to_config(const CovarianceModel& model);

/// Block-size rules: "sqrt" (ceil n^{1/2}), "pow:a" (ceil n^a) or a fixed
/// integer literal.
std::function<std::int64_t(std::int64_t)> block_rule_from_string(
    const std::string& spec);

/// 17-significant-digit decimal formatting used by every CSV cell.
std::string format_double(double v);

using Cell = std::variant<std::int64_t, double, std::string>;

struct OutputTable {
  std::vector<std::string> notes;  // "# ..." comment lines before the header
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Refuses to overwrite an existing file unless force is set.
void write_csv(const std::string& path, const OutputTable& table, bool force);
/// Same content, columns mirrored as arrays in one JSON object.
void write_json(const std::string& path, const OutputTable& table, bool force);

/// Single-column CSV (comment lines and one optional non-numeric header
/// line are skipped).
std::vector<double> read_series_csv(const std::string& path);

/// Resolve an output path against LRD_OUTPUT_DIR when relative.
std::string resolve_output_path(const std::string& path);

}  // namespace lrd
