#pragma once

#include <string>
#include <vector>

namespace refertriage {

// One parsed CSV record plus the 1-based line it started on (for error messages).
struct CsvRow {
    std::vector<std::string> fields;
    size_t line = 0;
};

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and newlines.
// The first row is returned like any other; callers treat it as the header.
std::vector<CsvRow> read_csv(const std::string& path);
std::vector<CsvRow> parse_csv(const std::string& text);

// Quotes a field only when it contains a comma, quote or newline.
std::string csv_quote(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

} // namespace refertriage
