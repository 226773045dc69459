#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace linresp::toml {

// Minimal TOML reader covering what the experiment configs use: [table]
// headers, dotted bare keys, strings, integers, floats, booleans, and
// (nested, possibly multi-line) arrays, with # comments.  Errors carry the
// line number and, where it exists, the offending key.
struct Value {
  enum class Kind { string, integer, floating, boolean, array };
  Kind kind = Kind::integer;
  std::string str;
  std::int64_t i = 0;
  double f = 0.0;
  bool b = false;
  std::vector<Value> arr;

  // Numeric coercion: integers are valid floats.
  double as_double() const;
  std::int64_t as_int() const;
  const std::string& as_string() const;
  bool as_bool() const;
  const std::vector<Value>& as_array() const;
  std::vector<double> as_double_array() const;
};

struct Table {
  // Fully dotted key -> value, e.g. "map.p0_sin".
  std::map<std::string, Value> entries;

  bool has(const std::string& key) const;
  const Value& at(const std::string& key) const;  // throws naming the key

  // Typed getters with defaults.
  double get_double(const std::string& key, double dflt) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace linresp::toml
