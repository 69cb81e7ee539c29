#include "drexp/report_json.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace drexp {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Json run() {
    Json j = value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return j;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("JSON parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  char peek() {
    if (pos_ >= s_.size()) fail("unexpected end");
    return s_[pos_];
  }

  char next() {
    const char c = peek();
    ++pos_;
    return c;
  }

  void skip_ws() {
    while (pos_ < s_.size() &&
           (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) {
      ++pos_;
    }
  }

  void expect(char c) {
    if (next() != c) fail(std::string("expected '") + c + "'");
  }

  void expect_word(std::string_view w) {
    for (char c : w) expect(c);
  }

  Json value() {
    skip_ws();
    switch (peek()) {
      case '{': return object();
      case '[': return array();
      case '"': return Json(string());
      case 't': expect_word("true"); return Json(true);
      case 'f': expect_word("false"); return Json(false);
      case 'n': expect_word("null"); return Json(nullptr);
      default: return number();
    }
  }

  Json object() {
    expect('{');
    Json obj = Json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return obj;
    }
    while (true) {
      skip_ws();
      std::string key = string();
      skip_ws();
      expect(':');
      obj[key] = value();
      skip_ws();
      const char c = next();
      if (c == '}') return obj;
      if (c != ',') fail("expected ',' or '}'");
    }
  }

  Json array() {
    expect('[');
    Json arr = Json::array();
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      arr.push_back(value());
      skip_ws();
      const char c = next();
      if (c == ']') return arr;
      if (c != ',') fail("expected ',' or ']'");
    }
  }

  std::string string() {
    expect('"');
    std::string out;
    while (true) {
      const char c = next();
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      const char e = next();
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
          unsigned code = 0;
          for (int i = 0; i < 4; ++i) {
            const char h = next();
            code <<= 4;
            if (h >= '0' && h <= '9') code += static_cast<unsigned>(h - '0');
            else if (h >= 'a' && h <= 'f') code += static_cast<unsigned>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F') code += static_cast<unsigned>(h - 'A' + 10);
            else fail("bad unicode escape");
          }
          // Reports are ASCII; encode BMP code points as UTF-8.
          if (code < 0x80) {
            out.push_back(static_cast<char>(code));
          } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
          } else {
            out.push_back(static_cast<char>(0xE0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
          }
          break;
        }
        default: fail("bad escape");
      }
    }
  }

  Json number() {
    const std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E' ||
                                s_[pos_] == '+' || s_[pos_] == '-')) {
      ++pos_;
    }
    const std::string token(s_.substr(start, pos_ - start));
    if (token.empty()) fail("expected a value");
    const bool floating = token.find_first_of(".eE") != std::string::npos;
    if (!floating) {
      if (token[0] == '-') {
        std::int64_t v = 0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec == std::errc() && res.ptr == token.data() + token.size()) return Json(v);
      } else {
        std::uint64_t v = 0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec == std::errc() && res.ptr == token.data() + token.size()) return Json(v);
      }
    }
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE) fail("bad number");
    return Json(d);
  }
};

void append_escaped(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
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

}  // namespace

std::string format_double_17(double v) {
  if (std::isnan(v) || std::isinf(v)) {
    throw InputError("NaN/infinity cannot appear in a report");
  }
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json::Json(double d) : v_(d) {
  if (std::isnan(d) || std::isinf(d)) {
    throw InputError("NaN/infinity cannot appear in a report");
  }
}

bool Json::is_number() const {
  return std::holds_alternative<std::int64_t>(v_) ||
         std::holds_alternative<std::uint64_t>(v_) || std::holds_alternative<double>(v_);
}

Json& Json::operator[](std::string_view key) {
  if (is_null()) v_ = Object{};
  auto& obj = std::get<Object>(v_);
  for (auto& [k, val] : obj) {
    if (k == key) return val;
  }
  obj.emplace_back(std::string(key), Json());
  return obj.back().second;
}

const Json* Json::find(std::string_view key) const {
  if (!is_object()) return nullptr;
  for (const auto& [k, val] : std::get<Object>(v_)) {
    if (k == key) return &val;
  }
  return nullptr;
}

const Json& Json::at(std::string_view key) const {
  const Json* j = find(key);
  if (!j) throw InputError("missing JSON key: " + std::string(key));
  return *j;
}

Json::Array& Json::items() {
  if (is_null()) v_ = Array{};
  return std::get<Array>(v_);
}

const Json::Array& Json::items() const { return std::get<Array>(v_); }

void Json::push_back(Json j) { items().push_back(std::move(j)); }

double Json::as_double() const {
  if (std::holds_alternative<double>(v_)) return std::get<double>(v_);
  if (std::holds_alternative<std::int64_t>(v_)) {
    return static_cast<double>(std::get<std::int64_t>(v_));
  }
  if (std::holds_alternative<std::uint64_t>(v_)) {
    return static_cast<double>(std::get<std::uint64_t>(v_));
  }
  throw InputError("JSON value is not a number");
}

std::int64_t Json::as_int() const {
  if (std::holds_alternative<std::int64_t>(v_)) return std::get<std::int64_t>(v_);
  if (std::holds_alternative<std::uint64_t>(v_)) {
    return static_cast<std::int64_t>(std::get<std::uint64_t>(v_));
  }
  throw InputError("JSON value is not an integer");
}

std::uint64_t Json::as_uint() const {
  if (std::holds_alternative<std::uint64_t>(v_)) return std::get<std::uint64_t>(v_);
  if (std::holds_alternative<std::int64_t>(v_) && std::get<std::int64_t>(v_) >= 0) {
    return static_cast<std::uint64_t>(std::get<std::int64_t>(v_));
  }
  throw InputError("JSON value is not an unsigned integer");
}

const std::string& Json::as_string() const {
  if (!is_string()) throw InputError("JSON value is not a string");
  return std::get<std::string>(v_);
}

bool Json::as_bool() const {
  if (!std::holds_alternative<bool>(v_)) throw InputError("JSON value is not a bool");
  return std::get<bool>(v_);
}

void Json::dump_to(std::string& out, int indent) const {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (std::holds_alternative<std::nullptr_t>(v_)) {
    out += "null";
  } else if (std::holds_alternative<bool>(v_)) {
    out += std::get<bool>(v_) ? "true" : "false";
  } else if (std::holds_alternative<std::int64_t>(v_)) {
    out += std::to_string(std::get<std::int64_t>(v_));
  } else if (std::holds_alternative<std::uint64_t>(v_)) {
    out += std::to_string(std::get<std::uint64_t>(v_));
  } else if (std::holds_alternative<double>(v_)) {
    out += format_double_17(std::get<double>(v_));
  } else if (std::holds_alternative<std::string>(v_)) {
    append_escaped(out, std::get<std::string>(v_));
  } else if (std::holds_alternative<Array>(v_)) {
    const auto& arr = std::get<Array>(v_);
    if (arr.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out += pad_in;
      arr[i].dump_to(out, indent + 1);
      if (i + 1 < arr.size()) out.push_back(',');
      out.push_back('\n');
    }
    out += pad + "]";
  } else {
    const auto& obj = std::get<Object>(v_);
    if (obj.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    for (std::size_t i = 0; i < obj.size(); ++i) {
      out += pad_in;
      append_escaped(out, obj[i].first);
      out += ": ";
      obj[i].second.dump_to(out, indent + 1);
      if (i + 1 < obj.size()) out.push_back(',');
      out.push_back('\n');
    }
    out += pad + "}";
  }
}

std::string Json::dump() const {
  std::string out;
  dump_to(out, 0);
  out.push_back('\n');
  return out;
}

Json Json::parse(std::string_view text) { return Parser(text).run(); }

}  // namespace drexp
