#include "dsched/rate_region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsched {

namespace {

// Dense two-phase (phase 1 only) simplex deciding feasibility of
//   find lambda >= 0:  sum_i lambda_i * v_i[n] >= b[n]  for all n,
//                      sum_i lambda_i <= 1.
// Bland's rule, so it terminates on degenerate instances. Problem sizes here
// are a handful of rows and columns.
bool simplex_feasible(const std::vector<std::vector<double>>& verts,
                      std::span<const double> b) {
  const int m = static_cast<int>(verts.size());
  const int n_rows = static_cast<int>(b.size()) + 1;
  const double eps = 1e-11;

  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));

  // Columns: lambda (m), surplus t (N), slack u (1), artificials (<= N).
  int n_art = 0;
  for (double v : b)
    if (v >= 0.0) ++n_art;
  const int cols = m + static_cast<int>(b.size()) + 1 + n_art;

  std::vector<std::vector<double>> tab(n_rows + 1,
                                       std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(n_rows, -1);

  int art_next = m + static_cast<int>(b.size()) + 1;
  for (size_t n = 0; n < b.size(); ++n) {
    const int r = static_cast<int>(n);
    const double sgn = (b[n] >= 0.0) ? 1.0 : -1.0;
    for (int i = 0; i < m; ++i) tab[r][i] = sgn * verts[i][n];
    tab[r][m + n] = -sgn;  // surplus
    tab[r][cols] = sgn * b[n];
    if (b[n] >= 0.0) {
      tab[r][art_next] = 1.0;
      basis[r] = art_next++;
    } else {
      basis[r] = m + static_cast<int>(n);  // flipped surplus is basic
    }
  }
  {
    const int r = n_rows - 1;
    for (int i = 0; i < m; ++i) tab[r][i] = 1.0;
    tab[r][m + b.size()] = 1.0;  // slack of the simplex row
    tab[r][cols] = 1.0;
    basis[r] = m + static_cast<int>(b.size());
  }

  // Phase-1 objective: minimize the artificial sum; price out basic
  // artificials.
  auto& obj = tab[n_rows];
  for (int c = m + static_cast<int>(b.size()) + 1; c < cols; ++c) obj[c] = 1.0;
  for (int r = 0; r < n_rows; ++r) {
    if (basis[r] >= m + static_cast<int>(b.size()) + 1) {
      for (int c = 0; c <= cols; ++c) obj[c] -= tab[r][c];
    }
  }

  for (int iter = 0; iter < 10000; ++iter) {
    int pivot_col = -1;
    for (int c = 0; c < cols; ++c) {
      if (obj[c] < -eps) {
        pivot_col = c;
        break;  // Bland: lowest index
      }
    }
    if (pivot_col < 0) break;

    int pivot_row = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < n_rows; ++r) {
      if (tab[r][pivot_col] > eps) {
        const double ratio = tab[r][cols] / tab[r][pivot_col];
        if (pivot_row < 0 || ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && basis[r] < basis[pivot_row])) {
          pivot_row = r;
          best_ratio = ratio;
        }
      }
    }
    if (pivot_row < 0) break;  // unbounded: cannot happen for feasibility form

    auto& prow = tab[pivot_row];
    const double p = prow[pivot_col];
    for (int c = 0; c <= cols; ++c) prow[c] /= p;
    for (int r = 0; r <= n_rows; ++r) {
      if (r == pivot_row) continue;
      const double f = tab[r][pivot_col];
      if (f == 0.0) continue;
      for (int c = 0; c <= cols; ++c) tab[r][c] -= f * prow[c];
    }
    basis[pivot_row] = pivot_col;
  }

  return -obj[cols] <= 1e-9 * scale;  // objective value = -obj[RHS]
}

}  // namespace

RateRegion::RateRegion(int num_users, std::vector<std::vector<double>> vertices)
    : num_users_(num_users), vertices_(std::move(vertices)) {
  if (num_users_ <= 0)
    throw std::invalid_argument("RateRegion: num_users must be positive");
  if (vertices_.empty())
    throw std::invalid_argument("RateRegion: vertex list is empty");
  for (const auto& v : vertices_) {
    if (static_cast<int>(v.size()) != num_users_)
      throw std::invalid_argument("RateRegion: vertex dimension mismatch");
    for (double c : v)
      if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("RateRegion: vertex coordinates must be finite and >= 0");
  }
}

RateRegion::LinearMax RateRegion::linear_max(std::span<const double> coeffs) const {
  if (static_cast<int>(coeffs.size()) != num_users_)
    throw std::invalid_argument("RateRegion::linear_max: coefficient size mismatch");

  int best = -1;
  double best_val = 0.0;
  for (size_t i = 0; i < vertices_.size(); ++i) {
    double val = 0.0;
    for (int n = 0; n < num_users_; ++n)
      if (coeffs[n] > 0.0) val += coeffs[n] * vertices_[i][n];
    if (val > best_val) {
      best_val = val;
      best = static_cast<int>(i);
    }
  }

  LinearMax out;
  out.rates.assign(num_users_, 0.0);
  if (best >= 0) {
    for (int n = 0; n < num_users_; ++n)
      out.rates[n] = (coeffs[n] > 0.0) ? vertices_[best][n] : 0.0;
    out.objective = best_val;
  }
  return out;
}

bool RateRegion::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != num_users_)
    throw std::invalid_argument("RateRegion::contains: point size mismatch");
  std::vector<double> b(num_users_);
  bool all_trivial = true;
  for (int n = 0; n < num_users_; ++n) {
    if (x[n] < 0.0) return false;
    b[n] = x[n] - tol;
    if (b[n] > 0.0) all_trivial = false;
  }
  if (all_trivial) return true;  // dominated by the origin
  return simplex_feasible(vertices_, b);
}

double RateRegion::max_rate(int user) const {
  double best = 0.0;
  for (const auto& v : vertices_) best = std::max(best, v[user]);
  return best;
}

RateRegion sample_region(int num_users, int num_vertices,
                         std::span<const double> rate_caps, Rng& rng) {
  if (num_vertices < 1)
    throw std::invalid_argument("sample_region: need at least one vertex");
  if (static_cast<int>(rate_caps.size()) != num_users)
    throw std::invalid_argument("sample_region: rate_caps size mismatch");
  std::vector<std::vector<double>> verts(num_vertices,
                                         std::vector<double>(num_users));
  for (int i = 0; i < num_vertices; ++i)
    for (int n = 0; n < num_users; ++n)
      verts[i][n] = rng.uniform(0.0, rate_caps[n]);
  return RateRegion(num_users, std::move(verts));
}

}  // namespace dsched
