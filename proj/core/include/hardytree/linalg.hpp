#pragma once

#include <vector>

namespace hardytree {

// Dense column-major kernels backed by LAPACK. Matrices are flat buffers of
// size rows*cols with column stride = rows.

// All singular values, descending. Consumes the buffer.
std::vector<double> singular_values(std::vector<double> a, int rows, int cols);

double top_singular_value(std::vector<double> a, int rows, int cols);

struct SingularTriplet {
  double sigma = 0.0;
  std::vector<double> left;   // rows
  std::vector<double> right;  // cols
};

// Leading singular triplet (economy SVD on a copy).
SingularTriplet top_singular_triplet(std::vector<double> a, int rows, int cols);

// a -= x * y^T
void rank1_downdate(std::vector<double>& a, int rows, int cols, const std::vector<double>& x,
                    const std::vector<double>& y);

// Eigenvalues of a symmetric matrix, ascending. Consumes the buffer.
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

// Solve G x = b for symmetric positive definite G (n x n).
std::vector<double> solve_spd(std::vector<double> g, std::vector<double> b);

}  // namespace hardytree
