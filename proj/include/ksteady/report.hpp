#pragma once

#include "ksteady/errors.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace ksteady {

/// Full-precision number formatting shared by all emitters (17 significant
/// digits, deterministic for identical inputs).
inline std::string format_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Comma-separated table with a header row and LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row) {
        if (row.size() != header_.size()) throw ParameterError("CsvWriter: column mismatch");
        rows_.push_back(row);
    }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            out += header_[i];
            out += (i + 1 < header_.size()) ? "," : "\n";
        }
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out += format_full(row[i]);
                out += (i + 1 < row.size()) ? "," : "\n";
            }
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ParameterError("CsvWriter: cannot open " + path);
        f << str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

inline constexpr int kSchemaVersion = 1;

} // namespace ksteady
