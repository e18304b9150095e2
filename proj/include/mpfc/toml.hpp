#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mpfc/errors.hpp"

namespace mpfc::toml {

/// Minimal TOML reader covering what run configs use: top-level keys,
/// [table] headers, strings, integers, floats, booleans, arrays (nestable)
/// and inline tables. Comments with '#'. No dotted keys, no multiline
/// strings, no dates.
class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

class Value {
public:
  Value() : data_(std::monostate{}) {}
  explicit Value(std::string s) : data_(std::move(s)) {}
  explicit Value(std::int64_t i) : data_(i) {}
  explicit Value(double d) : data_(d) {}
  explicit Value(bool b) : data_(b) {}
  explicit Value(Array a) : data_(std::make_shared<Array>(std::move(a))) {}
  explicit Value(Table t) : data_(std::make_shared<Table>(std::move(t))) {}

  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_number() const { return is_integer() || is_float(); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_array() const { return std::holds_alternative<std::shared_ptr<Array>>(data_); }
  bool is_table() const { return std::holds_alternative<std::shared_ptr<Table>>(data_); }

  const std::string& as_string() const { return std::get<std::string>(data_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  double as_number() const {
    return is_integer() ? static_cast<double>(std::get<std::int64_t>(data_)) : std::get<double>(data_);
  }
  const Array& as_array() const { return *std::get<std::shared_ptr<Array>>(data_); }
  const Table& as_table() const { return *std::get<std::shared_ptr<Table>>(data_); }

private:
  std::variant<std::monostate, std::string, std::int64_t, double, bool, std::shared_ptr<Array>,
               std::shared_ptr<Table>>
      data_;
};

/// Parse error annotated with line and column.
class TomlError : public std::runtime_error {
public:
  TomlError(std::string message, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + message),
        line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_, column_;
};

/// Parses a whole document into a table of tables/values.
Table parse(const std::string& text);

Table parse_file(const std::string& path);

} // namespace mpfc::toml
