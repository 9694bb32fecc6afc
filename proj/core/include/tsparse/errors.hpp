#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsparse {

// Malformed or unusable input data. Row/column are 1-based; 0 means "not applicable".
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : std::runtime_error(decorate(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string decorate(const std::string& what, std::size_t row, std::size_t column) {
        if (row == 0 && column == 0) return what;
        std::string out = what + " (";
        if (row != 0) out += "row " + std::to_string(row);
        if (row != 0 && column != 0) out += ", ";
        if (column != 0) out += "column " + std::to_string(column);
        return out + ")";
    }

    std::size_t row_;
    std::size_t column_;
};

// An iterative method failed to reach its tolerance.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters fall outside the regime where the sparse approximation is meaningful.
class regime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tsparse
