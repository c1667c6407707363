#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shapeval {

// Deterministic JSON emitter: keys appear in call order and every floating
// point value is printed with 17 significant digits, so identical inputs
// serialize byte for byte and doubles survive a round-trip exactly.
class JsonWriter {
 public:
  void begin_object() {
    prefix();
    out_ += '{';
    stack_.push_back('}');
    first_.push_back(true);
  }
  void end_object() { close('}'); }
  void begin_array() {
    prefix();
    out_ += '[';
    stack_.push_back(']');
    first_.push_back(true);
  }
  void end_array() { close(']'); }

  void key(std::string_view k) {
    separate();
    append_string(k);
    out_ += ':';
    pending_key_ = true;
  }

  void value(double v) {
    prefix();
    append_double(v);
  }
  void value(std::int64_t v) {
    prefix();
    out_ += std::to_string(v);
  }
  void value(int v) { value(static_cast<std::int64_t>(v)); }
  void value(std::uint64_t v) {
    prefix();
    out_ += std::to_string(v);
  }
  void value(bool v) {
    prefix();
    out_ += v ? "true" : "false";
  }
  void value(std::string_view v) {
    prefix();
    append_string(v);
  }
  void value(const char* v) { value(std::string_view(v)); }
  void null() {
    prefix();
    out_ += "null";
  }

  void kv(std::string_view k, double v) {
    key(k);
    value(v);
  }
  void kv(std::string_view k, std::int64_t v) {
    key(k);
    value(v);
  }
  void kv(std::string_view k, int v) {
    key(k);
    value(v);
  }
  void kv(std::string_view k, std::uint64_t v) {
    key(k);
    value(v);
  }
  void kv(std::string_view k, bool v) {
    key(k);
    value(v);
  }
  void kv(std::string_view k, std::string_view v) {
    key(k);
    value(v);
  }
  void kv(std::string_view k, const char* v) {
    key(k);
    value(std::string_view(v));
  }

  const std::string& str() const {
    if (!stack_.empty()) throw std::logic_error("unterminated JSON container");
    return out_;
  }

 private:
  void separate() {
    if (first_.empty()) return;
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
  void prefix() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    separate();
  }
  void close(char expected) {
    if (stack_.empty() || stack_.back() != expected)
      throw std::logic_error("mismatched JSON container");
    out_ += expected;
    stack_.pop_back();
    first_.pop_back();
  }
  void append_double(double v) {
    if (!std::isfinite(v)) {
      out_ += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ += buf;
  }
  void append_string(std::string_view s) {
    out_ += '"';
    for (char ch : s) {
      switch (ch) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        case '\b': out_ += "\\b"; break;
        case '\f': out_ += "\\f"; break;
        default:
          if (static_cast<unsigned char>(ch) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
            out_ += buf;
          } else {
            out_ += ch;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<char> stack_;
  std::vector<bool> first_;
  bool pending_key_ = false;
};

// %.17g rendering for CSV cells, matching the JSON emitter.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace shapeval
