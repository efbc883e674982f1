#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace shapecast::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<long> line_numbers;  // source line of each row, for error reporting
};

// Reads a comma-separated table with a mandatory header line. Tolerates a
// trailing '\r' per line; no quoting (all our schemas are plain numeric).
Table read_table(const std::filesystem::path& path);

void require_header(const Table& t, const std::filesystem::path& path,
                    const std::vector<std::string>& expected);

long long parse_int(const std::string& s, const std::string& path, long line,
                    const std::string& column);
double parse_double(const std::string& s, const std::string& path, long line,
                    const std::string& column);

// Fixed-point with up to `max_frac` fractional digits, trailing zeros trimmed.
std::string format_decimal(double v, int max_frac = 6);
// Shortest round-trippable-ish representation for diagnostics columns.
std::string format_full(double v);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace shapecast::csv
