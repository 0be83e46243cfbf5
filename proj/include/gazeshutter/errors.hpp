#pragma once

#include <stdexcept>
#include <string>

namespace gazeshutter {

// Thrown for malformed or inconsistent input data (files, streams, shapes).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a model cannot be trained (degenerate input, non-convergence).
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gazeshutter
