#include "wva/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wva/errors.hpp"

namespace wva {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json Json::object() {
  Json j;
  j.type_ = Type::object;
  return j;
}
Json Json::array() {
  Json j;
  j.type_ = Type::array;
  return j;
}
Json Json::str(std::string v) {
  Json j;
  j.type_ = Type::string;
  j.str_ = std::move(v);
  return j;
}
Json Json::num(double v) {
  Json j;
  j.type_ = Type::number;
  j.num_ = v;
  return j;
}
Json Json::integer(long long v) {
  Json j;
  j.type_ = Type::integer;
  j.int_ = v;
  return j;
}
Json Json::boolean(bool v) {
  Json j;
  j.type_ = Type::boolean;
  j.bool_ = v;
  return j;
}
Json Json::null() { return Json{}; }

Json& Json::set(const std::string& key, Json v) {
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  items_.push_back(std::move(v));
  return *this;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(size_t(indent) * size_t(depth + 1), ' ');
  const std::string close_pad(size_t(indent) * size_t(depth), ' ');
  switch (type_) {
    case Type::object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        escape_into(out, members_[i].first);
        out += ": ";
        members_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "}";
      return;
    }
    case Type::array: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < items_.size(); ++i) {
        out += pad;
        items_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "]";
      return;
    }
    case Type::string: escape_into(out, str_); return;
    case Type::number: out += format_double(num_); return;
    case Type::integer: out += std::to_string(int_); return;
    case Type::boolean: out += bool_ ? "true" : "false"; return;
    case Type::null_t: out += "null"; return;
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

std::string csv_row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_double(v));
  return csv_row(s);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, ConfigMap& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      flatten_json(it.value(), key, out);
    }
    return;
  }
  if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? "true" : "false";
  } else if (j.is_number_integer()) {
    out[prefix] = std::to_string(j.get<long long>());
  } else if (j.is_number()) {
    out[prefix] = format_double(j.get<double>());
  } else if (j.is_array()) {
    std::string list;
    for (const auto& v : j) {
      if (!list.empty()) list += ',';
      if (v.is_number_integer()) {
        list += std::to_string(v.get<long long>());
      } else if (v.is_number()) {
        list += format_double(v.get<double>());
      } else if (v.is_string()) {
        list += v.get<std::string>();
      } else {
        throw ConfigError(prefix + ": unsupported array element type in config");
      }
    }
    out[prefix] = list;
  } else {
    throw ConfigError(prefix + ": unsupported value type in config");
  }
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    cfg[key] = value;
  }
  return cfg;
}

ConfigMap parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  ConfigMap cfg;
  flatten_json(j, "", cfg);
  return cfg;
}

ConfigMap load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  const std::string t = trim(text);
  if (!t.empty() && t[0] == '{') return parse_config_json(text);
  return parse_config_text(text);
}

void apply_override(ConfigMap& cfg, const std::string& kv) {
  const size_t eq = kv.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + kv + "'");
  }
  cfg[kv.substr(0, eq)] = kv.substr(eq + 1);
}

double config_double(const ConfigMap& cfg, const std::string& key, double fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + it->second + "' as a number");
  }
}

double config_double_required(const ConfigMap& cfg, const std::string& key) {
  if (cfg.find(key) == cfg.end()) throw ConfigError(key + ": required key missing");
  return config_double(cfg, key, 0.0);
}

long long config_int(const ConfigMap& cfg, const std::string& key, long long fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + it->second + "' as an integer");
  }
}

bool config_bool(const ConfigMap& cfg, const std::string& key, bool fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError(key + ": cannot parse '" + it->second + "' as a boolean");
}

std::string config_string(const ConfigMap& cfg, const std::string& key,
                          const std::string& fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

std::vector<double> config_double_list(const ConfigMap& cfg, const std::string& key) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return {};
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse list element '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ConfigMap& cfg) {
  std::string blob;
  for (const auto& [k, v] : cfg) {
    blob += k;
    blob += '=';
    blob += v;
    blob += '\n';
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(blob)));
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wva
