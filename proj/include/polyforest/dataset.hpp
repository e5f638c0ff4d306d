#pragma once

#include <span>
#include <string>
#include <vector>

namespace polyforest {

// Column-major sample matrix, immutable once built. Bernoulli data uses
// {0.0, 1.0}; the nonparametric family lives in [0,1]. A zero-row dataset
// is allowed (oracle-backed runs never read sample values).
class Dataset {
public:
    Dataset(int n, int d) : n_(n), d_(d), columns_(d, std::vector<double>(n, 0.0)) {}
    explicit Dataset(std::vector<std::vector<double>> columns);

    int rows() const { return n_; }
    int cols() const { return d_; }
    std::span<const double> column(int j) const { return columns_.at(j); }
    double value(int row, int j) const { return columns_[j][row]; }

    // Mutation is only exposed to builders (simulators, CSV reader).
    std::vector<double>& mutable_column(int j) { return columns_.at(j); }

private:
    int n_;
    int d_;
    std::vector<std::vector<double>> columns_;
};

// CSV with a single header row `X1,...,Xd` and one decimal row per sample.
Dataset read_csv(const std::string& path);
Dataset parse_csv_string(const std::string& text);
void write_csv(const Dataset& data, const std::string& path);
std::string csv_to_string(const Dataset& data);

// True iff every value in the column is 0.0 or 1.0.
bool is_binary_column(std::span<const double> col);

}  // namespace polyforest
