#include "toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <vector>

#include "orl/error.hpp"

namespace orl::detail {

namespace {

using json = nlohmann::ordered_json;

class Parser {
 public:
  Parser(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }
  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        get();
      } else {
        break;
      }
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
      } else {
        break;
      }
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected text after value");
    get();
  }

  std::string bare_key() {
    skip_spaces();
    std::string key;
    if (peek() == '"') return basic_string();
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      key += text_[pos_++];
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_key()};
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(bare_key());
      skip_spaces();
    }
    return parts;
  }

  json* header(json& root) {
    ++pos_;
    const bool array = peek() == '[';
    if (array) ++pos_;
    const auto parts = dotted_key();
    if (peek() != ']') fail("unterminated table header");
    ++pos_;
    if (array) {
      if (peek() != ']') fail("unterminated array-of-tables header");
      ++pos_;
    }
    json* node = &root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      json& next = (*node)[parts[i]];
      if (next.is_null()) next = json::object();
      if (next.is_array() && !next.empty()) {
        node = &next.back();
      } else if (next.is_object()) {
        node = &next;
      } else {
        fail("key '" + parts[i] + "' is not a table");
      }
    }
    json& leaf = (*node)[parts.back()];
    if (array) {
      if (leaf.is_null()) leaf = json::array();
      if (!leaf.is_array()) fail("'" + parts.back() + "' is not an array of tables");
      leaf.push_back(json::object());
      return &leaf.back();
    }
    if (leaf.is_null()) leaf = json::object();
    if (!leaf.is_object()) fail("'" + parts.back() + "' is not a table");
    return &leaf;
  }

  void key_value(json& table) {
    const auto parts = dotted_key();
    if (peek() != '=') fail("expected '=' after key");
    ++pos_;
    skip_spaces();
    json* node = &table;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      json& next = (*node)[parts[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("key '" + parts[i] + "' is not a table");
      node = &next;
    }
    if (node->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*node)[parts.back()] = value();
  }

  json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '[') return array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  json array() {
    ++pos_;
    json out = json::array();
    skip_array_space();
    while (peek() != ']') {
      if (at_end()) fail("unterminated array");
      out.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        skip_array_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return out;
  }

  json number() {
    std::string token;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        if (c != '_') token += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (token.empty()) fail("expected a value");
    const std::string_view body = token.front() == '+' ? std::string_view(token).substr(1) : std::string_view(token);
    const bool is_float = body.find_first_of(".eE") != std::string_view::npos || body == "inf" || body == "-inf" ||
                          body == "nan";
    if (is_float) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec != std::errc() || p != body.data() + body.size()) fail("malformed number '" + token + "'");
      return v;
    }
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || p != body.data() + body.size()) fail("malformed value '" + token + "'");
    return v;
  }

  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

json parse_toml(std::string_view text, const std::string& source) { return Parser(text, source).run(); }

}  // namespace orl::detail
