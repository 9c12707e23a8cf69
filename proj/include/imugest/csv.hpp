#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imugest/matrix.hpp"
#include "imugest/textio.hpp"

namespace imugest {

// Numeric CSV: one header row of column names, then uniform rows of
// '.'-decimal numbers. No quoting; the formats this library exchanges never
// need it.
struct NumericCsv {
    std::vector<std::string> header;
    Mat values;
};

inline NumericCsv read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "': empty file");

    NumericCsv csv;
    for (const auto field : split(trim(line), ','))
        csv.header.emplace_back(trim(field));
    const std::size_t n_cols = csv.header.size();

    std::vector<double> data;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto fields = split(t, ',');
        ++n_rows;
        if (fields.size() != n_cols)
            throw std::runtime_error("'" + path + "': row " + std::to_string(n_rows) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(n_cols));
        for (std::size_t c = 0; c < n_cols; ++c) {
            const auto f = trim(fields[c]);
            double v{};
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
                throw std::runtime_error("'" + path + "': row " + std::to_string(n_rows) +
                                         ", column '" + csv.header[c] + "': cannot parse '" +
                                         std::string(f) + "'");
            data.push_back(v);
        }
    }

    csv.values = Mat(n_rows, n_cols);
    csv.values.storage() = std::move(data);
    return csv;
}

inline void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                              const Mat& values) {
    if (!values.empty() && values.cols() != header.size())
        throw std::runtime_error("write '" + path + "': header has " + std::to_string(header.size()) +
                                 " names for " + std::to_string(values.cols()) + " columns");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << '\n';
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c)
            out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace imugest
