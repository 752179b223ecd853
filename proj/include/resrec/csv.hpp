#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace resrec::csv {

/// One parsed record and the 1-based line it starts on.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct ParseError {
    std::size_t line = 0;
    std::string message;
};

struct Document {
    std::vector<Row> rows;  // header included as rows[0]
    std::vector<ParseError> errors;
};

/// RFC-4180 reader: comma delimiter, double-quote quoting, "" escapes,
/// quoted fields may span lines. Accepts LF or CRLF.
Document parse(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace resrec::csv
