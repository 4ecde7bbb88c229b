#include "simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace dsched::detail {

SimplexResult simplex_max(const std::vector<double>& c,
                          const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b) {
  const int rows = static_cast<int>(a.size());
  const int vars = static_cast<int>(c.size());
  const double eps = 1e-11;

  for (double rhs : b)
    if (rhs < 0.0)
      throw std::invalid_argument("simplex_max: negative right-hand side");

  const int cols = vars + rows;  // slack per row
  std::vector<std::vector<double>> tab(rows + 1,
                                       std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) {
    for (int v = 0; v < vars; ++v) tab[r][v] = a[r][v];
    tab[r][vars + r] = 1.0;
    tab[r][cols] = b[r];
    basis[r] = vars + r;
  }
  for (int v = 0; v < vars; ++v) tab[rows][v] = -c[v];

  SimplexResult out;
  for (int iter = 0; iter < 20000; ++iter) {
    int pivot_col = -1;
    for (int v = 0; v < cols; ++v) {
      if (tab[rows][v] < -eps) {
        pivot_col = v;
        break;  // Bland
      }
    }
    if (pivot_col < 0) {
      out.optimal = true;
      break;
    }
    int pivot_row = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < rows; ++r) {
      if (tab[r][pivot_col] > eps) {
        const double ratio = tab[r][cols] / tab[r][pivot_col];
        if (pivot_row < 0 || ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && basis[r] < basis[pivot_row])) {
          pivot_row = r;
          best_ratio = ratio;
        }
      }
    }
    if (pivot_row < 0) break;  // unbounded; caller's formulations exclude it

    auto& prow = tab[pivot_row];
    const double p = prow[pivot_col];
    for (int v = 0; v <= cols; ++v) prow[v] /= p;
    for (int r = 0; r <= rows; ++r) {
      if (r == pivot_row) continue;
      const double f = tab[r][pivot_col];
      if (f == 0.0) continue;
      for (int v = 0; v <= cols; ++v) tab[r][v] -= f * prow[v];
    }
    basis[pivot_row] = pivot_col;
  }

  out.solution.assign(vars, 0.0);
  for (int r = 0; r < rows; ++r)
    if (basis[r] < vars) out.solution[basis[r]] = tab[r][cols];
  out.objective = tab[rows][cols];
  return out;
}

}  // namespace dsched::detail
