#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spinrl/common.hpp"

namespace spinrl {

// minimal CSV writer with deterministic number formatting (shortest
// round-trippable representation via %.17g would print noise digits; %.*g
// with 17 significant digits is used so identical doubles always print
// identically, which the byte-for-byte reproducibility contract needs).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), ncols_(columns.size()) {
        if (!out_) throw ConfigError("csv: cannot open '" + path + "' for writing");
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
    }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    void row(const std::vector<double>& values) {
        if (values.size() != ncols_) throw LengthMismatch("csv: wrong column count");
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format(values[i]);
        }
        out_ << '\n';
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    size_t ncols_;
};

}  // namespace spinrl
