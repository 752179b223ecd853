#include "resrec/csv.hpp"

namespace resrec::csv {

Document parse(std::string_view text) {
    Document doc;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    // Strip a UTF-8 byte-order mark.
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    while (i < n) {
        Row row;
        row.line = line;
        std::string field;
        bool row_done = false;
        bool quoted = false;
        while (!row_done) {
            field.clear();
            if (i < n && text[i] == '"') {
                quoted = true;
                ++i;
                bool closed = false;
                while (i < n) {
                    const char c = text[i];
                    if (c == '"') {
                        if (i + 1 < n && text[i + 1] == '"') {
                            field += '"';
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field += c;
                    ++i;
                }
                if (!closed) doc.errors.push_back({row.line, "unterminated quoted field"});
                if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    doc.errors.push_back({line, "unexpected character after closing quote"});
                    while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') ++i;
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    if (text[i] == '"') doc.errors.push_back({line, "quote inside unquoted field"});
                    field += text[i++];
                }
            }
            row.fields.push_back(field);
            if (i < n && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < n && text[i] == '\r') ++i;
            if (i < n && text[i] == '\n') ++i;
            ++line;
            row_done = true;
        }
        // Skip blank lines.
        if (quoted || !(row.fields.size() == 1 && row.fields[0].empty())) doc.rows.push_back(std::move(row));
    }
    return doc;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    // A lone empty field would otherwise read back as a blank line.
    if (fields.size() == 1 && fields[0].empty()) {
        out << "\"\"\n";
        return;
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace resrec::csv
