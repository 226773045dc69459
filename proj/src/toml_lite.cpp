#include "linresp/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace linresp::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char take() {
    char c = s[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  // Whitespace, newlines, and comments.
  void skip_ws_any() {
    while (!done()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else if (c == '\n') {
        take();
      } else if (c == '#') {
        while (!done() && peek() != '\n') ++pos;
      } else {
        break;
      }
    }
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& cur) {
  std::string k;
  while (!cur.done() && is_bare_key_char(cur.peek())) k.push_back(cur.take());
  if (k.empty()) fail(cur.line, "expected a key");
  return k;
}

// Dotted sequence of bare keys.
std::string parse_key_path(Cursor& cur) {
  std::string path = parse_bare_key(cur);
  cur.skip_ws_inline();
  while (!cur.done() && cur.peek() == '.') {
    cur.take();
    cur.skip_ws_inline();
    path += '.';
    path += parse_bare_key(cur);
    cur.skip_ws_inline();
  }
  return path;
}

Value parse_value(Cursor& cur);

Value parse_string(Cursor& cur) {
  int line0 = cur.line;
  cur.take();  // opening quote
  Value v;
  v.kind = Value::Kind::string;
  while (true) {
    if (cur.done()) fail(line0, "unterminated string");
    char c = cur.take();
    if (c == '"') break;
    if (c == '\n') fail(line0, "unterminated string");
    if (c == '\\') {
      if (cur.done()) fail(line0, "unterminated escape");
      char e = cur.take();
      switch (e) {
        case '"': v.str.push_back('"'); break;
        case '\\': v.str.push_back('\\'); break;
        case 'n': v.str.push_back('\n'); break;
        case 't': v.str.push_back('\t'); break;
        default: fail(cur.line, std::string("unsupported escape \\") + e);
      }
    } else {
      v.str.push_back(c);
    }
  }
  return v;
}

Value parse_array(Cursor& cur) {
  cur.take();  // '['
  Value v;
  v.kind = Value::Kind::array;
  while (true) {
    cur.skip_ws_any();
    if (cur.done()) fail(cur.line, "unterminated array");
    if (cur.peek() == ']') {
      cur.take();
      break;
    }
    v.arr.push_back(parse_value(cur));
    cur.skip_ws_any();
    if (cur.done()) fail(cur.line, "unterminated array");
    if (cur.peek() == ',') {
      cur.take();
    } else if (cur.peek() != ']') {
      fail(cur.line, "expected ',' or ']' in array");
    }
  }
  return v;
}

Value parse_scalar_token(Cursor& cur) {
  int line0 = cur.line;
  std::string tok;
  while (!cur.done()) {
    char c = cur.peek();
    if (c == ',' || c == ']' || c == '#' || c == '\n' || c == ' ' ||
        c == '\t' || c == '\r')
      break;
    tok.push_back(cur.take());
  }
  if (tok.empty()) fail(line0, "expected a value");
  Value v;
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::boolean;
    v.b = (tok == "true");
    return v;
  }
  // Underscore digit grouping is legal TOML.
  std::string digits;
  for (char c : tok)
    if (c != '_') digits.push_back(c);
  bool looks_float = digits.find_first_of(".eE") != std::string::npos ||
                     digits == "inf" || digits == "-inf" || digits == "nan";
  const char* cs = digits.c_str();
  char* end = nullptr;
  if (!looks_float) {
    long long iv = std::strtoll(cs, &end, 10);
    if (end && *end == '\0' && end != cs) {
      v.kind = Value::Kind::integer;
      v.i = iv;
      return v;
    }
  }
  double fv = std::strtod(cs, &end);
  if (!end || *end != '\0' || end == cs)
    fail(line0, "cannot parse value '" + tok + "'");
  v.kind = Value::Kind::floating;
  v.f = fv;
  return v;
}

Value parse_value(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) fail(cur.line, "expected a value");
  char c = cur.peek();
  if (c == '"') return parse_string(cur);
  if (c == '[') return parse_array(cur);
  return parse_scalar_token(cur);
}

void expect_line_end(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) return;
  char c = cur.peek();
  if (c == '#') {
    while (!cur.done() && cur.peek() != '\n') ++cur.pos;
    return;
  }
  if (c == '\n' || c == '\r') return;
  fail(cur.line, "unexpected trailing characters");
}

}  // namespace

double Value::as_double() const {
  if (kind == Kind::floating) return f;
  if (kind == Kind::integer) return static_cast<double>(i);
  throw std::runtime_error("config value is not a number");
}

std::int64_t Value::as_int() const {
  if (kind == Kind::integer) return i;
  throw std::runtime_error("config value is not an integer");
}

const std::string& Value::as_string() const {
  if (kind == Kind::string) return str;
  throw std::runtime_error("config value is not a string");
}

bool Value::as_bool() const {
  if (kind == Kind::boolean) return b;
  throw std::runtime_error("config value is not a boolean");
}

const std::vector<Value>& Value::as_array() const {
  if (kind == Kind::array) return arr;
  throw std::runtime_error("config value is not an array");
}

std::vector<double> Value::as_double_array() const {
  std::vector<double> out;
  for (const Value& v : as_array()) out.push_back(v.as_double());
  return out;
}

bool Table::has(const std::string& key) const { return entries.count(key) > 0; }

const Value& Table::at(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw std::runtime_error("missing config field '" + key + "'");
  return it->second;
}

double Table::get_double(const std::string& key, double dflt) const {
  return has(key) ? at(key).as_double() : dflt;
}

std::int64_t Table::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? at(key).as_int() : dflt;
}

std::string Table::get_string(const std::string& key,
                              const std::string& dflt) const {
  return has(key) ? at(key).as_string() : dflt;
}

bool Table::get_bool(const std::string& key, bool dflt) const {
  return has(key) ? at(key).as_bool() : dflt;
}

Table parse(const std::string& text) {
  Table t;
  Cursor cur{text};
  std::string prefix;
  while (true) {
    cur.skip_ws_any();
    if (cur.done()) break;
    if (cur.peek() == '[') {
      cur.take();
      cur.skip_ws_inline();
      if (!cur.done() && cur.peek() == '[')
        fail(cur.line, "arrays of tables are not supported");
      prefix = parse_key_path(cur);
      cur.skip_ws_inline();
      if (cur.done() || cur.peek() != ']')
        fail(cur.line, "unterminated table header");
      cur.take();
      expect_line_end(cur);
      continue;
    }
    int line0 = cur.line;
    std::string key = parse_key_path(cur);
    cur.skip_ws_inline();
    if (cur.done() || cur.peek() != '=')
      fail(line0, "expected '=' after key '" + key + "'");
    cur.take();
    Value v = parse_value(cur);
    expect_line_end(cur);
    std::string full = prefix.empty() ? key : prefix + "." + key;
    if (t.entries.count(full))
      fail(line0, "duplicate key '" + full + "'");
    t.entries.emplace(std::move(full), std::move(v));
  }
  return t;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace linresp::toml
