#include "mckv/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mckv/errors.hpp"

namespace mckv::csv {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

Writer::Writer(const std::filesystem::path& path, std::string_view header)
    : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open for writing: " + path.string());
    out_ << header << '\n';
}

void Writer::raw_line(std::string_view line) { out_ << line << '\n'; }

void Writer::close() { out_.close(); }

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            double v = std::nan("");
            if (!cell.empty()) {
                if (cell == "inf") v = HUGE_VAL;
                else if (cell == "-inf") v = -HUGE_VAL;
                else {
                    auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                    if (r.ec != std::errc()) v = std::nan("");
                }
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace mckv::csv
