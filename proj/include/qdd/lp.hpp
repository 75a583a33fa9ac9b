#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace qdd {

// Dense phase-I simplex for the feasibility problem
//   find x >= 0 with A x = b,
// sized for the tiny instances produced by the closure tests (a few equality
// rows, up to a few hundred columns). Bland's rule keeps it deterministic
// and cycle-free.
class FeasibilityLP {
 public:
  struct Result {
    bool feasible = false;
    std::vector<double> x;
  };

  // A is row-major, m rows by n cols.
  static Result solve(const std::vector<std::vector<double>>& A,
                      std::vector<double> b, double tol = 1e-9) {
    const size_t m = A.size();
    const size_t n = m == 0 ? 0 : A[0].size();
    Result res;
    res.x.assign(n, 0.0);
    if (m == 0) {
      res.feasible = true;
      return res;
    }

    // Tableau with artificial variables: columns [x | artificial | rhs].
    std::vector<std::vector<double>> T(m + 1,
                                       std::vector<double>(n + m + 1, 0.0));
    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (size_t j = 0; j < n; ++j) T[i][j] = sign * A[i][j];
      T[i][n + i] = 1.0;
      T[i][n + m] = sign * b[i];
      basis[i] = n + i;
    }
    // Objective row: minimize sum of artificials, expressed in terms of the
    // nonbasic columns (reduced costs).
    for (size_t j = 0; j <= n + m; ++j) {
      double s = 0.0;
      for (size_t i = 0; i < m; ++i) s += T[i][j];
      T[m][j] = (j >= n && j < n + m) ? s - 1.0 : s;
    }

    const size_t max_iter = 50 * (n + m + 4);
    for (size_t iter = 0; iter < max_iter; ++iter) {
      // Bland: smallest index with positive reduced cost.
      size_t pivot_col = n + m;
      for (size_t j = 0; j < n + m; ++j) {
        if (T[m][j] > tol) {
          pivot_col = j;
          break;
        }
      }
      if (pivot_col == n + m) break;  // optimal

      size_t pivot_row = m;
      double best_ratio = 0.0;
      for (size_t i = 0; i < m; ++i) {
        if (T[i][pivot_col] > tol) {
          const double ratio = T[i][n + m] / T[i][pivot_col];
          if (pivot_row == m || ratio < best_ratio - tol ||
              (std::abs(ratio - best_ratio) <= tol &&
               basis[i] < basis[pivot_row])) {
            pivot_row = i;
            best_ratio = ratio;
          }
        }
      }
      if (pivot_row == m) break;  // unbounded (cannot happen in phase I)

      pivot(T, pivot_row, pivot_col);
      basis[pivot_row] = pivot_col;
    }

    if (T[m][n + m] > tol) return res;  // artificials remain positive

    res.feasible = true;
    for (size_t i = 0; i < m; ++i) {
      if (basis[i] < n) res.x[basis[i]] = T[i][n + m];
    }
    return res;
  }

 private:
  static void pivot(std::vector<std::vector<double>>& T, size_t pr,
                    size_t pc) {
    const size_t rows = T.size(), cols = T[0].size();
    const double p = T[pr][pc];
    for (size_t j = 0; j < cols; ++j) T[pr][j] /= p;
    for (size_t i = 0; i < rows; ++i) {
      if (i == pr) continue;
      const double f = T[i][pc];
      if (f == 0.0) continue;
      for (size_t j = 0; j < cols; ++j) T[i][j] -= f * T[pr][j];
    }
  }
};

// Numerical rank of a row-major matrix via Gaussian elimination with
// partial pivoting.
inline int matrix_rank(std::vector<std::vector<double>> M, double tol = 1e-9) {
  const size_t rows = M.size();
  if (rows == 0) return 0;
  const size_t cols = M[0].size();
  int rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows; ++col) {
    size_t best = row;
    for (size_t i = row + 1; i < rows; ++i) {
      if (std::abs(M[i][col]) > std::abs(M[best][col])) best = i;
    }
    if (std::abs(M[best][col]) < tol) continue;
    std::swap(M[row], M[best]);
    for (size_t i = 0; i < rows; ++i) {
      if (i == row) continue;
      const double f = M[i][col] / M[row][col];
      for (size_t j = col; j < cols; ++j) M[i][j] -= f * M[row][j];
    }
    ++rank;
    ++row;
  }
  return rank;
}

}  // namespace qdd
