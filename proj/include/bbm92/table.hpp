// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Row-oriented result tables with CSV and JSON emitters.
//
// CSV: header row, '.' decimal separator, numbers printed with 12
// significant digits, RFC 4180 quoting for text cells.
// JSON: {"meta": {...}, "rows": [{column: value, ...}, ...]}.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bbm92/error.hpp"
#include <nlohmann/json.hpp>

namespace bbm92 {

// Counts and seeds use the exact unsigned alternative.
using Cell = std::variant<double, std::string, std::uint64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    detail::require(row.size() == columns.size(), "row width does not match header");
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw InvalidArgument("no column named " + name);
  }

  double number(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const double* d = std::get_if<double>(&c)) return *d;
    if (const auto* u = std::get_if<std::uint64_t>(&c)) return static_cast<double>(*u);
    throw InvalidArgument("column " + name + " is not numeric");
  }

  const std::string& text(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    throw InvalidArgument("column " + name + " is not text");
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

namespace impl {

inline std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Splits CSV text into records of raw fields; `quoted` marks fields that
// were enclosed in quotes so they are never read back as numbers.
struct RawField {
  std::string value;
  bool quoted = false;
};

inline std::vector<std::vector<RawField>> split_csv(const std::string& text) {
  std::vector<std::vector<RawField>> records;
  std::vector<RawField> record;
  RawField field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.value += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.value += ch;
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
      field.quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field = {};
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.value.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record = {};
      field = {};
      any = false;
    } else {
      field.value += ch;
      any = true;
    }
  }
  if (in_quotes) throw InvalidArgument("unterminated quoted CSV field");
  if (any || !field.value.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

inline Cell parse_cell(const RawField& f) {
  if (f.quoted) return f.value;
  if (f.value == "nan") return std::nan("");
  if (f.value == "inf") return HUGE_VAL;
  if (f.value == "-inf") return -HUGE_VAL;
  if (!f.value.empty() && f.value.size() <= 20 &&
      f.value.find_first_not_of("0123456789") == std::string::npos) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(f.value.data(), f.value.data() + f.value.size(), v);
    if (ec == std::errc() && ptr == f.value.data() + f.value.size()) return v;
  }
  if (!f.value.empty()) {
    std::size_t used = 0;
    try {
      const double v = std::stod(f.value, &used);
      if (used == f.value.size()) return v;
    } catch (const std::exception&) {
    }
  }
  return f.value;
}

}  // namespace impl

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    os << (i ? "," : "") << impl::quote_csv(t.columns[i]);
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (const double* d = std::get_if<double>(&row[i])) {
        os << format_number(*d);
      } else if (const auto* u = std::get_if<std::uint64_t>(&row[i])) {
        os << *u;
      } else {
        const auto& s = std::get<std::string>(row[i]);
        // Text that would read back as a number is quoted.
        const bool numeric = !std::holds_alternative<std::string>(impl::parse_cell({s, false}));
        os << (numeric || s.empty() ? "\"" + s + "\"" : impl::quote_csv(s));
      }
    }
    os << '\n';
  }
  return os.str();
}

inline Table parse_csv(const std::string& text) {
  const auto records = impl::split_csv(text);
  detail::require(!records.empty(), "CSV text has no header");
  Table t;
  for (const auto& f : records.front()) t.columns.push_back(f.value);
  for (std::size_t r = 1; r < records.size(); ++r) {
    detail::require(records[r].size() == t.columns.size(), "ragged CSV record");
    std::vector<Cell> row;
    for (const auto& f : records[r]) row.push_back(impl::parse_cell(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline nlohmann::ordered_json to_json(const Table& t, const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (const double* d = std::get_if<double>(&row[i])) {
        obj[t.columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json();
      } else if (const auto* u = std::get_if<std::uint64_t>(&row[i])) {
        obj[t.columns[i]] = *u;
      } else {
        obj[t.columns[i]] = std::get<std::string>(row[i]);
      }
    }
    rows.push_back(std::move(obj));
  }
  return {{"meta", meta}, {"rows", rows}};
}

}  // namespace bbm92
