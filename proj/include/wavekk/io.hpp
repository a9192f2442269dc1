#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wavekk/core.hpp"

namespace wavekk {

/// Fixed float formatting: 17 significant digits, '.' decimal point. The
/// byte-exact contract for CSV/JSON outputs and golden files.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Append-only JSON writer with caller-controlled key order, numbers routed
/// through fmt_double. Enough structure for the report files; reading JSON
/// goes through nlohmann instead.
class JsonWriter {
public:
  JsonWriter() { stack_.push_back(State::root); }

  void obj_open(const std::string& key = {}) { open('{', key); }
  void obj_close() { close('}'); }
  void arr_open(const std::string& key = {}) { open('[', key); }
  void arr_close() { close(']'); }

  void field(const std::string& key, double v) { item(key, fmt_double(v)); }
  void field(const std::string& key, int v) { item(key, std::to_string(v)); }
  void field(const std::string& key, long long v) { item(key, std::to_string(v)); }
  void field(const std::string& key, bool v) { item(key, v ? "true" : "false"); }
  void field(const std::string& key, const std::string& v) { item(key, quote(v)); }
  void field(const std::string& key, const char* v) { item(key, quote(v)); }
  void elem(double v) { item({}, fmt_double(v)); }
  void elem(const std::string& v) { item({}, quote(v)); }

  const std::string& str() const { return out_; }

private:
  enum class State { root, in_object, in_array };

  static std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      switch (c) {
        case '"': q += "\\\""; break;
        case '\\': q += "\\\\"; break;
        case '\n': q += "\\n"; break;
        case '\t': q += "\\t"; break;
        default: q += c;
      }
    }
    q += '"';
    return q;
  }

  void comma() {
    if (need_comma_) out_ += ',';
    out_ += '\n';
    out_.append(2 * (stack_.size() - 1), ' ');
  }

  void open(char c, const std::string& key) {
    if (stack_.back() != State::root) comma();
    if (!key.empty()) out_ += quote(key) + ": ";
    out_ += c;
    need_comma_ = false;
    stack_.push_back(c == '{' ? State::in_object : State::in_array);
  }

  void close(char c) {
    stack_.pop_back();
    out_ += '\n';
    out_.append(2 * (stack_.size() - 1), ' ');
    out_ += c;
    need_comma_ = true;
  }

  void item(const std::string& key, const std::string& text) {
    comma();
    if (!key.empty()) out_ += quote(key) + ": ";
    out_ += text;
    need_comma_ = true;
  }

  std::string out_;
  std::vector<State> stack_;
  bool need_comma_ = false;
};

/// '.' decimal, ',' separator, header row, LF line endings.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ += ',';
      out_ += header[i];
    }
    out_ += '\n';
  }

  void cell(double v) { cell_text(fmt_double(v)); }
  void cell(int v) { cell_text(std::to_string(v)); }
  void cell(const std::string& v) { cell_text(v); }
  void end_row() {
    out_ += '\n';
    first_ = true;
  }

  const std::string& str() const { return out_; }

private:
  void cell_text(const std::string& s) {
    if (!first_) out_ += ',';
    out_ += s;
    first_ = false;
  }
  std::string out_;
  bool first_ = true;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace wavekk
