#pragma once

#include <stdexcept>
#include <string>

namespace polyforest {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed text input (graph, model, config, CSV). Carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// A column has no variance left after conditioning; names the column.
class DegenerateColumnError : public Error {
public:
    DegenerateColumnError(const std::string& what, int column)
        : Error(what), column_(column) {}
    int column() const { return column_; }

private:
    int column_;
};

// Two orientation rules demanded opposite directions for one edge.
class OrientationConflictError : public Error {
public:
    OrientationConflictError(const std::string& what) : Error(what) {}
};

// Operation not defined for the requested family (e.g. exact nonparametric
// dependence, whose defining infimum is not computable).
class UnsupportedOperationError : public Error {
public:
    UnsupportedOperationError(const std::string& what) : Error(what) {}
};

}  // namespace polyforest
