#ifndef TROPICA_IO_HPP
#define TROPICA_IO_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tropica/errors.hpp"
#include "tropica/scalar.hpp"

namespace tropica {

// Deterministic text emission: object keys sorted, floats at 17 significant
// digits, LF line endings. Identical inputs must produce identical bytes.

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static const char* hex = "0123456789abcdef";
          out += "\\u00";
          out += hex[(c >> 4) & 0xf];
          out += hex[c & 0xf];
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

// Emission-only JSON tree. Arrays keep insertion order; objects dump their
// fields sorted by key. Non-finite reals are emitted as quoted strings so the
// document stays valid JSON.
struct JsonValue {
  enum class Kind { Null, Bool, Int, Real, Str, Arr, Obj };
  Kind kind = Kind::Null;
  bool b = false;
  long long i = 0;
  double x = 0;
  std::string s;
  std::vector<JsonValue> items;
  std::vector<std::pair<std::string, JsonValue>> fields;

  static JsonValue null() { return {}; }
  static JsonValue boolean(bool v) {
    JsonValue j;
    j.kind = Kind::Bool;
    j.b = v;
    return j;
  }
  static JsonValue integer(long long v) {
    JsonValue j;
    j.kind = Kind::Int;
    j.i = v;
    return j;
  }
  static JsonValue real(double v) {
    JsonValue j;
    j.kind = Kind::Real;
    j.x = v;
    return j;
  }
  static JsonValue str(std::string v) {
    JsonValue j;
    j.kind = Kind::Str;
    j.s = std::move(v);
    return j;
  }
  static JsonValue array() {
    JsonValue j;
    j.kind = Kind::Arr;
    return j;
  }
  static JsonValue object() {
    JsonValue j;
    j.kind = Kind::Obj;
    return j;
  }

  void push(JsonValue v) { items.push_back(std::move(v)); }
  void set(std::string key, JsonValue v) { fields.emplace_back(std::move(key), std::move(v)); }

  void write(std::string& out, int indent) const {
    switch (kind) {
      case Kind::Null: out += "null"; break;
      case Kind::Bool: out += b ? "true" : "false"; break;
      case Kind::Int: out += std::to_string(i); break;
      case Kind::Real:
        if (std::isfinite(x))
          out += format_double(x);
        else
          out += json_quote(format_double(x));
        break;
      case Kind::Str: out += json_quote(s); break;
      case Kind::Arr: {
        if (items.empty()) {
          out += "[]";
          break;
        }
        out += "[\n";
        for (std::size_t k = 0; k < items.size(); ++k) {
          out.append(std::size_t(indent + 2), ' ');
          items[k].write(out, indent + 2);
          out += k + 1 < items.size() ? ",\n" : "\n";
        }
        out.append(std::size_t(indent), ' ');
        out += "]";
        break;
      }
      case Kind::Obj: {
        if (fields.empty()) {
          out += "{}";
          break;
        }
        std::vector<const std::pair<std::string, JsonValue>*> order;
        order.reserve(fields.size());
        for (const auto& f : fields) order.push_back(&f);
        std::sort(order.begin(), order.end(),
                  [](const auto* a, const auto* b) { return a->first < b->first; });
        out += "{\n";
        for (std::size_t k = 0; k < order.size(); ++k) {
          out.append(std::size_t(indent + 2), ' ');
          out += json_quote(order[k]->first);
          out += ": ";
          order[k]->second.write(out, indent + 2);
          out += k + 1 < order.size() ? ",\n" : "\n";
        }
        out.append(std::size_t(indent), ' ');
        out += "}";
        break;
      }
    }
  }

  std::string dump() const {
    std::string out;
    write(out, 0);
    out += "\n";
    return out;
  }
};

// Fields holding a comma, quote, or newline are quoted with internal quotes
// doubled; rows always end in a single LF.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

// 64-bit FNV-1a content digest, 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IOError("read failed on " + path);
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open " + path + " for writing");
  out.write(content.data(), std::streamsize(content.size()));
  out.flush();
  if (!out.good()) throw IOError("write failed on " + path);
}

}  // namespace tropica

#endif
