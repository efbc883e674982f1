#include "shapecast/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "shapecast/errors.hpp"

namespace shapecast::csv {

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    Table t;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            t.header = split_line(line);
            continue;
        }
        if (line.empty()) continue;
        t.rows.push_back(split_line(line));
        t.line_numbers.push_back(lineno);
    }
    if (lineno == 0) throw ParseError(path.string(), 0, "empty file, header expected");
    return t;
}

void require_header(const Table& t, const std::filesystem::path& path,
                    const std::vector<std::string>& expected) {
    if (t.header != expected) {
        std::string want;
        for (const auto& c : expected) {
            if (!want.empty()) want += ",";
            want += c;
        }
        throw ParseError(path.string(), 1, "unexpected header, want '" + want + "'");
    }
}

long long parse_int(const std::string& s, const std::string& path, long line,
                    const std::string& column) {
    long long v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ParseError(path, line, "column '" + column + "': not an integer: '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const std::string& path, long line,
                    const std::string& column) {
    double v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ParseError(path, line, "column '" + column + "': not a number: '" + s + "'");
    return v;
}

std::string format_decimal(double v, int max_frac) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", max_frac, v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

Writer::Writer(const std::filesystem::path& path) : out_(path), path_(path.string()) {
    if (!out_) throw IoError("cannot write " + path_);
}

void Writer::row(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += fields[i];
    }
    line += '\n';
    out_ << line;
    if (!out_) throw IoError("write failed: " + path_);
}

void Writer::close() {
    out_.close();
    if (out_.fail()) throw IoError("close failed: " + path_);
}

}  // namespace shapecast::csv
