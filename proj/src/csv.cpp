#include "refertriage/csv.hpp"

#include <fstream>
#include <sstream>

#include "refertriage/errors.hpp"

namespace refertriage {

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    size_t line = 1;
    size_t i = 0;
    const size_t n = text.size();

    while (i < n) {
        CsvRow row;
        row.line = line;
        std::string field;
        bool in_quotes = false;
        bool row_done = false;

        while (i < n && !row_done) {
            const char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field += c;
                    ++i;
                }
            } else {
                switch (c) {
                    case '"':
                        if (!field.empty())
                            throw DataError("line " + std::to_string(line) +
                                            ": quote inside unquoted field");
                        in_quotes = true;
                        ++i;
                        break;
                    case ',':
                        row.fields.push_back(std::move(field));
                        field.clear();
                        ++i;
                        break;
                    case '\r':
                        ++i; // swallow; CRLF handled by the \n branch
                        break;
                    case '\n':
                        ++line;
                        ++i;
                        row_done = true;
                        break;
                    default:
                        field += c;
                        ++i;
                }
            }
        }
        if (in_quotes)
            throw DataError("line " + std::to_string(row.line) + ": unterminated quoted field");
        row.fields.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    // A lone trailing newline does not produce an empty record.
    if (!rows.empty() && rows.back().fields.size() == 1 && rows.back().fields[0].empty() &&
        !text.empty() && text.back() == '\n')
        rows.pop_back();
    return rows;
}

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_quote(fields[i]);
    }
    return out;
}

} // namespace refertriage
