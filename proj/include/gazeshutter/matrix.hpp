#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gazeshutter/errors.hpp"

namespace gazeshutter {

// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    void push_row(std::span<const double> values) {
        if (rows == 0 && cols == 0) cols = values.size();
        if (values.size() != cols)
            throw DataError("matrix row has " + std::to_string(values.size()) +
                            " columns, expected " + std::to_string(cols));
        data.insert(data.end(), values.begin(), values.end());
        ++rows;
    }
};

}  // namespace gazeshutter
