#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seba/errors.hpp"

namespace seba {

// Fixed float formatting for reproducible CSV output: 17 significant digits,
// lowercase exponent, locale-independent.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(std::string schema, std::vector<std::string> columns)
        : schema_(std::move(schema)), columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size())
            throw ParameterError("csv row width does not match the header");
        rows_.push_back(std::move(cells));
    }

    std::string str() const {
        std::ostringstream os;
        os << "# schema=" << schema_ << "\n";
        write_line(os, columns_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

    void write_file(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);  // binary keeps LF endings everywhere
        if (!f) throw ParameterError("cannot open output file: " + path);
        f << str();
    }

private:
    static void write_line(std::ostringstream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    }

    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace seba
