#include "hardytree/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>

namespace hardytree {

std::vector<double> singular_values(std::vector<double> a, int rows, int cols) {
  std::vector<double> s(std::min(rows, cols));
  if (s.empty()) return s;
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(),
                                   nullptr, rows, nullptr, cols);
  if (info != 0) throw std::runtime_error("dgesdd failed, info=" + std::to_string(info));
  return s;
}

double top_singular_value(std::vector<double> a, int rows, int cols) {
  auto s = singular_values(std::move(a), rows, cols);
  return s.empty() ? 0.0 : s[0];
}

SingularTriplet top_singular_triplet(std::vector<double> a, int rows, int cols) {
  int k = std::min(rows, cols);
  SingularTriplet out;
  if (k == 0) return out;
  std::vector<double> s(k), u(static_cast<size_t>(rows) * k), vt(static_cast<size_t>(k) * cols);
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, a.data(), rows, s.data(),
                                   u.data(), rows, vt.data(), k);
  if (info != 0) throw std::runtime_error("dgesdd failed, info=" + std::to_string(info));
  out.sigma = s[0];
  out.left.assign(u.begin(), u.begin() + rows);
  out.right.resize(cols);
  for (int j = 0; j < cols; ++j) out.right[j] = vt[static_cast<size_t>(j) * k];
  return out;
}

void rank1_downdate(std::vector<double>& a, int rows, int cols, const std::vector<double>& x,
                    const std::vector<double>& y) {
  for (int j = 0; j < cols; ++j) {
    double yj = y[j];
    if (yj == 0.0) continue;
    double* col = a.data() + static_cast<size_t>(j) * rows;
    for (int i = 0; i < rows; ++i) col[i] -= x[i] * yj;
  }
}

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> w(n);
  if (n == 0) return w;
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyev failed, info=" + std::to_string(info));
  return w;
}

std::vector<double> solve_spd(std::vector<double> g, std::vector<double> b) {
  int n = static_cast<int>(b.size());
  if (n == 0) return b;
  lapack_int info = LAPACKE_dposv(LAPACK_COL_MAJOR, 'L', n, 1, g.data(), n, b.data(), n);
  if (info != 0) throw std::runtime_error("dposv failed, info=" + std::to_string(info));
  return b;
}

}  // namespace hardytree
