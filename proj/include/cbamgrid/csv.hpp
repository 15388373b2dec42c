#pragma once

#include <string>
#include <vector>

namespace cbamgrid::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // Schema error if absent
    bool has_column(const std::string& name) const;
};

// Reads a comma-separated file with a mandatory header row. No quoting
// support: none of the formats used here embed commas. Raises Io on missing
// file, Parse on ragged rows (message names row and column counts).
Table read_file(const std::string& path);

Table parse(const std::string& content, const std::string& origin);

// Shortest round-trip decimal formatting for doubles (std::to_chars), so
// emitted files are byte-deterministic and re-parse to the same bits.
std::string format_double(double v);

double parse_double(const std::string& s, const std::string& context);
long long parse_int(const std::string& s, const std::string& context);

std::string join_row(const std::vector<std::string>& fields);

void write_file(const std::string& path, const Table& table);

}  // namespace cbamgrid::csv
