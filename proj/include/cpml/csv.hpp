#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpml::csv {

/// One parsed field. `quoted` distinguishes `""` (present, empty) from an
/// empty unquoted cell, which loaders treat as absent.
struct Field {
  std::string value;
  bool quoted = false;
};

struct Row {
  std::vector<Field> fields;
  std::size_t line = 0; // 1-based physical line the row starts on
};

/// RFC-4180 reader: quoted fields may contain commas, CR/LF and doubled quotes.
/// Accepts both LF and CRLF record terminators.
class Reader {
public:
  Reader(std::istream& in, std::string source_name);

  /// Reads the next record; returns false at end of input.
  bool next(Row& row);

  const std::string& source() const { return source_; }

private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 1;
};

/// Quotes a field when it contains a delimiter, quote, CR or LF (or when forced).
std::string escape(std::string_view value, bool force_quotes = false);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict double parse: whole string must be consumed. Accepts "inf"/"-inf".
std::optional<double> parse_double(std::string_view text);

/// Reads the header row and checks it equals `expected`.
/// Throws ParseError on mismatch.
void expect_header(Reader& reader, const std::vector<std::string>& expected);

} // namespace cpml::csv
