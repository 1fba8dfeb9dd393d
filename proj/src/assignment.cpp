#include "phaselab/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace phaselab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hungarian algorithm (potentials + shortest augmenting path), cost
// minimization, requires n <= m. Returns row -> col, all rows matched.
std::vector<int> hungarian_min(const Matrix& a) {
    int n = static_cast<int>(a.size());
    int m = static_cast<int>(a[0].size());
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j]) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

// optimal max total over min(|rows|, |cols|) pairs for a row/col subset
double solve_max(const Matrix& score, const std::vector<int>& rows,
                 const std::vector<int>& cols) {
    if (rows.empty() || cols.empty()) return 0.0;
    bool transpose = rows.size() > cols.size();
    const std::vector<int>& rr = transpose ? cols : rows;
    const std::vector<int>& cc = transpose ? rows : cols;

    Matrix cost(rr.size(), std::vector<double>(cc.size()));
    for (std::size_t i = 0; i < rr.size(); ++i)
        for (std::size_t j = 0; j < cc.size(); ++j)
            cost[i][j] = transpose ? -score[cc[j]][rr[i]] : -score[rr[i]][cc[j]];

    auto match = hungarian_min(cost);
    double total = 0.0;
    for (std::size_t i = 0; i < match.size(); ++i) total -= cost[i][match[i]];
    return total;
}

} // namespace

Assignment max_assignment(const Matrix& score) {
    if (score.empty() || score[0].empty())
        throw std::invalid_argument("max_assignment: empty matrix");
    int rows = static_cast<int>(score.size());
    int cols = static_cast<int>(score[0].size());
    for (const auto& row : score) {
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("max_assignment: ragged matrix");
        for (double x : row)
            if (!std::isfinite(x))
                throw std::invalid_argument("max_assignment: non-finite entry");
    }

    std::vector<int> all_rows(rows), all_cols(cols);
    for (int i = 0; i < rows; ++i) all_rows[i] = i;
    for (int j = 0; j < cols; ++j) all_cols[j] = j;
    const double best_total = solve_max(score, all_rows, all_cols);
    const double tol = 1e-9;

    // fix rows in order, choosing the smallest column that still reaches the
    // optimum; gives the lexicographically smallest optimal assignment
    Assignment out;
    out.row_to_col.assign(rows, -1);
    std::vector<char> col_used(cols, 0);
    double fixed = 0.0;
    int skips_left = rows > cols ? rows - cols : 0;

    for (int i = 0; i < rows; ++i) {
        std::vector<int> rest_rows;
        for (int r = i + 1; r < rows; ++r) rest_rows.push_back(r);

        int chosen = -1;
        for (int c = 0; c < cols; ++c) {
            if (col_used[c]) continue;
            std::vector<int> rest_cols;
            for (int cc = 0; cc < cols; ++cc)
                if (!col_used[cc] && cc != c) rest_cols.push_back(cc);
            double v = fixed + score[i][c] + solve_max(score, rest_rows, rest_cols);
            if (v >= best_total - tol) {
                chosen = c;
                break;
            }
        }
        if (chosen < 0) {
            if (skips_left > 0) {
                --skips_left;
                continue; // this row stays unmatched
            }
            // numerically unreachable; fall back to the best remaining column
            double best_v = -kInf;
            for (int c = 0; c < cols; ++c) {
                if (col_used[c]) continue;
                std::vector<int> rest_cols;
                for (int cc = 0; cc < cols; ++cc)
                    if (!col_used[cc] && cc != c) rest_cols.push_back(cc);
                double v = fixed + score[i][c] + solve_max(score, rest_rows, rest_cols);
                if (v > best_v) {
                    best_v = v;
                    chosen = c;
                }
            }
        }
        out.row_to_col[i] = chosen;
        col_used[chosen] = 1;
        fixed += score[i][chosen];
    }
    out.total = fixed;
    return out;
}

} // namespace phaselab
