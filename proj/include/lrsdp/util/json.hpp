#pragma once
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrsdp::json {

inline std::string format_number(double x);

// Minimal JSON document model: parse / navigate / dump. Numbers are doubles;
// object key order is preserved, making dumps deterministic.
class Value {
 public:
  enum class Kind { Null, Bool, Number, String, Array, Object };

  Kind kind = Kind::Null;
  bool boolean = false;
  double number = 0.0;
  std::string text;
  std::vector<Value> items;
  std::vector<std::pair<std::string, Value>> members;

  static Value null() { return Value{}; }
  static Value of(bool b) {
    Value v;
    v.kind = Kind::Bool;
    v.boolean = b;
    return v;
  }
  static Value of(double x) {
    Value v;
    v.kind = Kind::Number;
    v.number = x;
    return v;
  }
  static Value of(std::string s) {
    Value v;
    v.kind = Kind::String;
    v.text = std::move(s);
    return v;
  }
  static Value of(const char* s) { return of(std::string(s)); }
  static Value array() {
    Value v;
    v.kind = Kind::Array;
    return v;
  }
  static Value object() {
    Value v;
    v.kind = Kind::Object;
    return v;
  }

  Value& push(Value v) {
    items.push_back(std::move(v));
    return items.back();
  }
  Value& set(std::string key, Value v) {
    members.emplace_back(std::move(key), std::move(v));
    return members.back().second;
  }

  const Value* find(const std::string& key) const {
    for (const auto& [k, v] : members)
      if (k == key) return &v;
    return nullptr;
  }

  bool as_bool() const {
    expect(Kind::Bool, "boolean");
    return boolean;
  }
  double as_number() const {
    expect(Kind::Number, "number");
    return number;
  }
  const std::string& as_string() const {
    expect(Kind::String, "string");
    return text;
  }
  const std::vector<Value>& as_array() const {
    expect(Kind::Array, "array");
    return items;
  }
  const std::vector<std::pair<std::string, Value>>& as_object() const {
    expect(Kind::Object, "object");
    return members;
  }
  long long as_int64() const {
    expect(Kind::Number, "number");
    if (std::floor(number) != number || std::abs(number) > 9.007199254740992e15)
      throw std::runtime_error("json number is not an exact integer");
    return static_cast<long long>(number);
  }

 private:
  void expect(Kind want, const char* what) const {
    if (kind != want)
      throw std::runtime_error(std::string("json value is not a ") + what);
  }
};

namespace detail {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("json parse error at offset " +
                             std::to_string(pos) + ": " + msg);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' ||
                              s[pos] == '\n' || s[pos] == '\r'))
      ++pos;
  }
  char peek() {
    if (pos >= s.size()) fail("unexpected end of input");
    return s[pos];
  }
  bool consume(char c) {
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect_char(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  bool consume_word(const char* w) {
    std::size_t k = 0;
    while (w[k] != '\0') {
      if (pos + k >= s.size() || s[pos + k] != w[k]) return false;
      ++k;
    }
    pos += k;
    return true;
  }

  void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string parse_string_body() {
    expect_char('"');
    std::string out;
    while (true) {
      if (pos >= s.size()) fail("unterminated string");
      char c = s[pos++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos >= s.size()) fail("unterminated escape");
        char e = s[pos++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case '/': out.push_back('/'); break;
          case 'b': out.push_back('\b'); break;
          case 'f': out.push_back('\f'); break;
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 't': out.push_back('\t'); break;
          case 'u': {
            if (pos + 4 > s.size()) fail("truncated \\u escape");
            unsigned cp = 0;
            for (int k = 0; k < 4; ++k) {
              char h = s[pos++];
              cp <<= 4;
              if (h >= '0' && h <= '9')
                cp |= static_cast<unsigned>(h - '0');
              else if (h >= 'a' && h <= 'f')
                cp |= static_cast<unsigned>(h - 'a' + 10);
              else if (h >= 'A' && h <= 'F')
                cp |= static_cast<unsigned>(h - 'A' + 10);
              else
                fail("bad hex digit in \\u escape");
            }
            append_utf8(out, cp);
            break;
          }
          default:
            fail("unknown escape character");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  Value parse_value() {
    skip_ws();
    char c = peek();
    if (c == '{') {
      ++pos;
      Value v = Value::object();
      skip_ws();
      if (consume('}')) return v;
      while (true) {
        skip_ws();
        std::string key = parse_string_body();
        skip_ws();
        expect_char(':');
        v.set(std::move(key), parse_value());
        skip_ws();
        if (consume(',')) continue;
        expect_char('}');
        return v;
      }
    }
    if (c == '[') {
      ++pos;
      Value v = Value::array();
      skip_ws();
      if (consume(']')) return v;
      while (true) {
        v.push(parse_value());
        skip_ws();
        if (consume(',')) continue;
        expect_char(']');
        return v;
      }
    }
    if (c == '"') return Value::of(parse_string_body());
    if (consume_word("true")) return Value::of(true);
    if (consume_word("false")) return Value::of(false);
    if (consume_word("null")) return Value::null();
    // number
    std::size_t start = pos;
    if (consume('-')) {
    }
    while (pos < s.size() &&
           ((s[pos] >= '0' && s[pos] <= '9') || s[pos] == '.' ||
            s[pos] == 'e' || s[pos] == 'E' || s[pos] == '+' || s[pos] == '-'))
      ++pos;
    if (pos == start) fail("unexpected character");
    std::string tok = s.substr(start, pos - start);
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0') {
      pos = start;
      fail("malformed number");
    }
    return Value::of(x);
  }
};

inline void dump_string(const std::string& in, std::string& out) {
  out.push_back('"');
  for (char c : in) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

inline void dump_value(const Value& v, std::string& out, int indent, int depth);

inline void newline_indent(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out.push_back('\n');
  out.append(static_cast<std::size_t>(indent) * depth, ' ');
}

inline void dump_value(const Value& v, std::string& out, int indent, int depth) {
  switch (v.kind) {
    case Value::Kind::Null:
      out += "null";
      break;
    case Value::Kind::Bool:
      out += v.boolean ? "true" : "false";
      break;
    case Value::Kind::Number:
      out += format_number(v.number);
      break;
    case Value::Kind::String:
      dump_string(v.text, out);
      break;
    case Value::Kind::Array: {
      if (v.items.empty()) {
        out += "[]";
        break;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& it : v.items) {
        if (!first) out.push_back(',');
        first = false;
        newline_indent(out, indent, depth + 1);
        dump_value(it, out, indent, depth + 1);
      }
      newline_indent(out, indent, depth);
      out.push_back(']');
      break;
    }
    case Value::Kind::Object: {
      if (v.members.empty()) {
        out += "{}";
        break;
      }
      out.push_back('{');
      bool first = true;
      for (const auto& [k, mv] : v.members) {
        if (!first) out.push_back(',');
        first = false;
        newline_indent(out, indent, depth + 1);
        dump_string(k, out);
        out.push_back(':');
        if (indent > 0) out.push_back(' ');
        dump_value(mv, out, indent, depth + 1);
      }
      newline_indent(out, indent, depth);
      out.push_back('}');
      break;
    }
  }
}

}  // namespace detail

// Doubles print with 17 significant digits (lossless round trip); integral
// values within the exact range print as plain integers.
inline std::string format_number(double x) {
  if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 9.007199254740992e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(x));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Value parse(const std::string& text) {
  detail::Parser p{text};
  Value v = p.parse_value();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters after document");
  return v;
}

inline std::string dump(const Value& v, int indent = 0) {
  std::string out;
  detail::dump_value(v, out, indent, 0);
  if (indent > 0) out.push_back('\n');
  return out;
}

}  // namespace lrsdp::json
