#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace mckv::csv {

// All numeric CSV output goes through format_number: 17 significant digits,
// '.' decimal separator regardless of locale, LF line endings. This is what
// makes byte-identical reproducibility checks possible.
std::string format_number(double v);

class Writer {
public:
    Writer(const std::filesystem::path& path, std::string_view header);

    template <typename... Ts>
    void row(Ts... vals) {
        bool first = true;
        ((line_ += (first ? (first = false, "") : ","), append(vals)), ...);
        line_ += '\n';
        out_ << line_;
        line_.clear();
    }

    void raw_line(std::string_view line);
    void close();

private:
    void append(double v) { line_ += format_number(v); }
    void append(std::int64_t v) { line_ += std::to_string(v); }
    void append(const std::string& s) { line_ += s; }
    void append(const char* s) { line_ += s; }

    std::ofstream out_;
    std::string line_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with a single header line. Non-numeric cells are NaN.
Table read_table(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

} // namespace mckv::csv
