#pragma once

#include <vector>

namespace phaselab {

using Matrix = std::vector<std::vector<double>>;

struct Assignment {
    std::vector<int> row_to_col; // -1 for unmatched rows
    double total = 0.0;
};

// Exact maximum-total assignment over min(rows, cols) pairs (Hungarian
// algorithm), with ties broken lexicographically on (row, col) index pairs.
Assignment max_assignment(const Matrix& score);

} // namespace phaselab
