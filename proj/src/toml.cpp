#include "mpfc/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace mpfc::toml {

namespace {

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  Table parse_document() {
    Table root;
    Table* current = &root;
    std::string current_name;

    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      char c = peek();
      if (c == '[') {
        advance();
        std::string name = bare_key();
        skip_spaces();
        expect(']');
        end_of_line();
        if (root.count(name)) fail("duplicate table [" + name + "]");
        root.emplace(name, Value(Table{}));
        // Map nodes are stable; the table payload sits behind a shared_ptr.
        current = const_cast<Table*>(&root.at(name).as_table());
        current_name = name;
      } else {
        std::string key = bare_key();
        skip_spaces();
        expect('=');
        skip_spaces();
        Value v = value();
        end_of_line();
        std::string scope = current_name.empty() ? key : current_name + "." + key;
        if (current->count(key)) fail("duplicate key '" + scope + "'");
        current->emplace(key, std::move(v));
      }
    }
    return root;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw TomlError(msg, line_, static_cast<int>(pos_ - line_start_) + 1);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) advance();
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') advance();
  }

  void skip_blank() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!at_end() && (peek() == '\n' || peek() == '\r')) {
        advance();
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() == '\r') advance();
    if (at_end()) return;
    if (peek() != '\n') fail("expected end of line");
    advance();
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  std::string bare_key() {
    skip_spaces();
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-'))
      advance();
    if (pos_ == start) fail("expected a key");
    return text_.substr(start, pos_ - start);
  }

  Value value() {
    skip_spaces();
    char c = peek();
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (c == '{') return inline_table();
    if (std::isalpha(static_cast<unsigned char>(c))) return keyword_value();
    return number_value();
  }

  Value string_value() {
    expect('"');
    std::string out;
    while (!at_end() && peek() != '"') {
      char c = peek();
      if (c == '\n') fail("unterminated string");
      if (c == '\\') {
        advance();
        switch (peek()) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail("unsupported escape sequence");
        }
        advance();
      } else {
        out += c;
        advance();
      }
    }
    expect('"');
    return Value(std::move(out));
  }

  Value keyword_value() {
    std::string word = bare_key();
    if (word == "true") return Value(true);
    if (word == "false") return Value(false);
    if (word == "inf") return Value(std::numeric_limits<double>::infinity());
    fail("unexpected keyword '" + word + "'");
  }

  Value number_value() {
    std::size_t start = pos_;
    bool is_float = false;
    if (peek() == '+' || peek() == '-') advance();
    if (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) {
      bool negative = text_[start] == '-';
      std::string word = bare_key();
      if (word == "inf")
        return Value(negative ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity());
      fail("malformed number");
    }
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                         peek() == 'e' || peek() == 'E' || peek() == '+' || peek() == '-')) {
      if (peek() == '.' || peek() == 'e' || peek() == 'E') is_float = true;
      if ((peek() == '+' || peek() == '-') && pos_ > start) {
        char prev = text_[pos_ - 1];
        if (prev != 'e' && prev != 'E') break;
      }
      advance();
    }
    if (pos_ == start) fail("expected a value");
    std::string token = text_.substr(start, pos_ - start);
    char* end = nullptr;
    if (is_float) {
      double d = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size()) fail("malformed number '" + token + "'");
      return Value(d);
    }
    long long i = std::strtoll(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size()) fail("malformed number '" + token + "'");
    return Value(static_cast<std::int64_t>(i));
  }

  Value array_value() {
    expect('[');
    Array items;
    for (;;) {
      skip_blank();
      if (peek() == ']') {
        advance();
        break;
      }
      items.push_back(value());
      skip_blank();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ']') {
        advance();
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return Value(std::move(items));
  }

  Value inline_table() {
    expect('{');
    Table t;
    skip_spaces();
    if (peek() == '}') {
      advance();
      return Value(std::move(t));
    }
    for (;;) {
      std::string key = bare_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      if (t.count(key)) fail("duplicate key '" + key + "' in inline table");
      t.emplace(key, value());
      skip_spaces();
      if (peek() == ',') {
        advance();
        skip_spaces();
        continue;
      }
      expect('}');
      break;
    }
    return Value(std::move(t));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

} // namespace

Table parse(const std::string& text) { return Parser(text).parse_document(); }

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

} // namespace mpfc::toml
