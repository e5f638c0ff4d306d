#include "polyforest/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polyforest/errors.hpp"

namespace polyforest {

Dataset::Dataset(std::vector<std::vector<double>> columns)
    : n_(columns.empty() ? 0 : static_cast<int>(columns[0].size())),
      d_(static_cast<int>(columns.size())),
      columns_(std::move(columns)) {
    for (const auto& col : columns_)
        if (static_cast<int>(col.size()) != n_)
            throw Error("Dataset: ragged columns");
}

Dataset parse_csv_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV", 1);
    int d = 1;
    for (char c : line)
        if (c == ',') ++d;
    std::vector<std::vector<double>> cols(d);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        int j = 0;
        size_t start = 0;
        while (start <= line.size()) {
            size_t comma = line.find(',', start);
            size_t end = comma == std::string::npos ? line.size() : comma;
            if (j >= d) throw ParseError("row has more than " + std::to_string(d) + " fields", line_no);
            std::string tok = line.substr(start, end - start);
            while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw ParseError("invalid number '" + tok + "'", line_no);
            cols[j].push_back(v);
            ++j;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (j != d) throw ParseError("row has " + std::to_string(j) + " fields, expected " +
                                         std::to_string(d),
                                     line_no);
    }
    return Dataset(std::move(cols));
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_string(buf.str());
}

std::string csv_to_string(const Dataset& data) {
    std::ostringstream out;
    for (int j = 0; j < data.cols(); ++j) out << (j ? "," : "") << "X" << (j + 1);
    out << "\n";
    char num[64];
    for (int i = 0; i < data.rows(); ++i) {
        for (int j = 0; j < data.cols(); ++j) {
            std::snprintf(num, sizeof(num), "%.17g", data.value(i, j));
            out << (j ? "," : "") << num;
        }
        out << "\n";
    }
    return out.str();
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV file: " + path);
    out << csv_to_string(data);
}

bool is_binary_column(std::span<const double> col) {
    for (double v : col)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

}  // namespace polyforest
