#pragma once

// Deterministic serialization: an insertion-ordered JSON writer and CSV rows
// with all floating-point values printed via "%.17g", plus the flat key=value
// config format (a JSON object is accepted interchangeably).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wva {

inline constexpr const char* kToolName = "wvamag";
inline constexpr const char* kToolVersion = "0.1.0";

std::string format_double(double v);  // %.17g

// --- minimal ordered JSON document ---------------------------------------------

class Json {
 public:
  static Json object();
  static Json array();
  static Json str(std::string v);
  static Json num(double v);
  static Json integer(long long v);
  static Json boolean(bool v);
  static Json null();

  Json& set(const std::string& key, Json v);  // object member, insertion order
  Json& push(Json v);                         // array element
  std::string dump(int indent = 2) const;

 private:
  enum class Type { object, array, string, number, integer, boolean, null_t };
  Type type_ = Type::null_t;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;
  std::string str_;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;

  void dump_to(std::string& out, int indent, int depth) const;
};

// --- CSV ------------------------------------------------------------------------

std::string csv_row(const std::vector<std::string>& cells);
std::string csv_row_numeric(const std::vector<double>& cells);

// --- flat config ------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);   // key = value lines, # comments
ConfigMap parse_config_json(const std::string& text);   // flattened with dotted keys
ConfigMap load_config_file(const std::string& path);
void apply_override(ConfigMap& cfg, const std::string& key_equals_value);

// Typed accessors; errors name the offending key.
double config_double(const ConfigMap& cfg, const std::string& key, double fallback);
double config_double_required(const ConfigMap& cfg, const std::string& key);
long long config_int(const ConfigMap& cfg, const std::string& key, long long fallback);
bool config_bool(const ConfigMap& cfg, const std::string& key, bool fallback);
std::string config_string(const ConfigMap& cfg, const std::string& key,
                          const std::string& fallback);
std::vector<double> config_double_list(const ConfigMap& cfg, const std::string& key);

std::uint64_t fnv1a64(const std::string& data);
std::string config_hash(const ConfigMap& cfg);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace wva
