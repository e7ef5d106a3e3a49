#include "holq/tensor_io.hpp"

#include "holq/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>

namespace holq {

namespace {

struct Token {
  std::string_view text;
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  // Returns false at end of input.
  bool next(Token& tok) {
    while (pos_ < src_.size() && is_space(src_[pos_])) advance();
    if (pos_ >= src_.size()) return false;
    tok.offset = pos_;
    tok.line = line_;
    tok.column = column_;
    const std::size_t start = pos_;
    while (pos_ < src_.size() && !is_space(src_[pos_])) advance();
    tok.text = src_.substr(start, pos_ - start);
    return true;
  }

  std::string where_end() const {
    return "byte offset " + std::to_string(src_.size()) + " (line " + std::to_string(line_) +
           ", column " + std::to_string(column_) + ")";
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

std::string where(const Token& tok) {
  return "byte offset " + std::to_string(tok.offset) + " (line " + std::to_string(tok.line) +
         ", column " + std::to_string(tok.column) + ")";
}

std::size_t parse_size(const Token& tok, const char* what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
    throw ParseError("expected " + std::string(what) + " at " + where(tok) + ", found '" +
                     std::string(tok.text) + "'");
  }
  return v;
}

double parse_value(const Token& tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || !std::isfinite(v)) {
    throw ParseError("invalid value '" + std::string(tok.text) + "' at " + where(tok));
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_tensor(std::ostream& os, const Tensor& t) {
  os << "tensor " << t.order();
  for (auto d : t.shape()) os << ' ' << d;
  os << '\n';
  const std::size_t fiber = t.order() > 0 ? t.shape()[0] : 1;
  const auto data = t.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    os << format_double(data[i]);
    os << ((i + 1) % fiber == 0 ? '\n' : ' ');
  }
}

Tensor read_tensor(std::istream& is) {
  const std::string src{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  Scanner scan(src);
  Token tok;
  if (!scan.next(tok) || tok.text != "tensor") {
    throw ParseError("missing 'tensor' header at byte offset 0 (line 1, column 1)");
  }
  if (!scan.next(tok)) throw ParseError("missing mode count at " + scan.where_end());
  if (tok.line != 1) throw ParseError("header must be on the first line; mode count at " + where(tok));
  const std::size_t order = parse_size(tok, "mode count");
  if (order == 0) throw ParseError("mode count must be positive at " + where(tok));

  Shape shape;
  for (std::size_t m = 0; m < order; ++m) {
    if (!scan.next(tok) || tok.line != 1) {
      throw ParseError("header declares " + std::to_string(order) + " modes but lists only " +
                       std::to_string(m) + " sizes on line 1");
    }
    const auto d = parse_size(tok, "mode size");
    if (d == 0) throw ParseError("mode size must be positive at " + where(tok));
    shape.push_back(d);
  }

  const std::size_t expected = shape_product(shape);
  std::vector<double> data;
  data.reserve(expected);
  while (scan.next(tok)) {
    if (tok.line == 1) throw ParseError("unexpected token after header at " + where(tok));
    if (data.size() == expected) {
      throw ParseError("too many values: expected " + std::to_string(expected) +
                       ", extra value at " + where(tok));
    }
    data.push_back(parse_value(tok));
  }
  if (data.size() != expected) {
    throw ParseError("too few values: expected " + std::to_string(expected) + ", found " +
                     std::to_string(data.size()) + "; input ends at " + scan.where_end());
  }
  return Tensor(std::move(shape), std::move(data));
}

void write_tensor_file(const std::string& path, const Tensor& t) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_tensor(os, t);
  if (!os) throw Error("failed writing '" + path + "'");
}

Tensor read_tensor_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  try {
    return read_tensor(is);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace holq
