#include "cpml/csv.hpp"

#include "cpml/error.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>

namespace cpml::csv {

Reader::Reader(std::istream& in, std::string source_name) : in_(in), source_(std::move(source_name)) {}

bool Reader::next(Row& row) {
  row.fields.clear();
  row.line = line_;
  if (in_.peek() == std::char_traits<char>::eof()) {
    return false;
  }

  Field field;
  bool in_quotes = false;
  bool after_quote = false; // closing quote seen, expecting delimiter or EOL
  for (;;) {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      if (in_quotes) {
        throw ParseError(source_, row.line, "", "unterminated quoted field");
      }
      row.fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.value.push_back('"');
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (ch == '\n') {
          ++line_;
        }
        field.value.push_back(ch);
      }
      continue;
    }
    if (ch == ',') {
      row.fields.push_back(std::move(field));
      field = Field{};
      after_quote = false;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && in_.peek() == '\n') {
        in_.get();
      }
      ++line_;
      row.fields.push_back(std::move(field));
      return true;
    } else if (ch == '"' && field.value.empty() && !field.quoted) {
      in_quotes = true;
      field.quoted = true;
    } else if (after_quote) {
      throw ParseError(source_, row.line, "", "unexpected character after closing quote");
    } else if (ch == '"') {
      throw ParseError(source_, row.line, "", "bare quote inside unquoted field");
    } else {
      field.value.push_back(ch);
    }
  }
}

std::string escape(std::string_view value, bool force_quotes) {
  const bool needs = force_quotes || value.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) {
    return std::string(value);
  }
  std::string out;
  out.reserve(value.size() + 2);
  out.push_back('"');
  for (char c : value) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (text == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

void expect_header(Reader& reader, const std::vector<std::string>& expected) {
  Row row;
  if (!reader.next(row)) {
    throw ParseError(reader.source(), 1, "", "missing header row");
  }
  bool ok = row.fields.size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    ok = row.fields[i].value == expected[i];
  }
  if (!ok) {
    std::string want;
    for (const auto& e : expected) {
      want += (want.empty() ? "" : ",") + e;
    }
    throw ParseError(reader.source(), row.line, "", "header must be '" + want + "'");
  }
}

} // namespace cpml::csv
