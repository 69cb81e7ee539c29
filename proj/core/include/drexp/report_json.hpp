#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "drexp/errors.hpp"

namespace drexp {

/// Minimal JSON document with insertion-ordered objects and a canonical,
/// reproducible text form: floats carry 17 significant digits, -0 is
/// normalized to 0, and NaN/IEEE-infinity are rejected (the "+inf" token is a
/// plain string at the report level). parse(dump(x)) re-dumps byte-identical.
class Json {
 public:
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;

  Json() : v_(nullptr) {}
  Json(std::nullptr_t) : v_(nullptr) {}              // NOLINT
  Json(bool b) : v_(b) {}                            // NOLINT
  Json(int i) : v_(static_cast<std::int64_t>(i)) {}  // NOLINT
  Json(std::int64_t i) : v_(i) {}                    // NOLINT
  Json(std::uint64_t u) : v_(u) {}                   // NOLINT
  Json(double d);                                    // NOLINT: rejects NaN/inf
  Json(const char* s) : v_(std::string(s)) {}        // NOLINT
  Json(std::string s) : v_(std::move(s)) {}          // NOLINT

  static Json object() { Json j; j.v_ = Object{}; return j; }
  static Json array() { Json j; j.v_ = Array{}; return j; }

  bool is_null() const { return std::holds_alternative<std::nullptr_t>(v_); }
  bool is_object() const { return std::holds_alternative<Object>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_number() const;

  /// Object access: inserts the key on first use (mutable overload).
  Json& operator[](std::string_view key);
  const Json* find(std::string_view key) const;
  const Json& at(std::string_view key) const;

  Array& items();
  const Array& items() const;
  void push_back(Json j);

  double as_double() const;
  std::int64_t as_int() const;
  std::uint64_t as_uint() const;
  const std::string& as_string() const;
  bool as_bool() const;

  /// Canonical pretty form (2-space indent, LF newlines, trailing newline).
  std::string dump() const;

  static Json parse(std::string_view text);

 private:
  std::variant<std::nullptr_t, bool, std::int64_t, std::uint64_t, double, std::string,
               Array, Object>
      v_;

  void dump_to(std::string& out, int indent) const;
};

/// %.17g with -0 normalized to 0; throws on NaN or infinity.
std::string format_double_17(double v);

}  // namespace drexp
