#pragma once

#include "lpvdda/types.hpp"

namespace lpvdda {

/// Default numerical-rank tolerance: max(rows, cols) * eps * sigma_max.
double default_rank_tol(const Matrix& m, double sigma_max);

/// Smallest eigenvalue >= -tol (symmetric part is used).
bool psd_check(const Matrix& m, double tol);

double min_eigenvalue(const Matrix& m);

/// Numerical rank via singular values; tol < 0 selects the default rule,
/// otherwise singular values >= tol * sigma_max count.
int numerical_rank(const Matrix& m, double tol = -1.0);

/// Orthonormal basis of the right null space {x : M x = 0}. May have zero
/// columns. tol as in numerical_rank.
Matrix nullspace_basis(const Matrix& m, double tol = -1.0);

/// Orthonormal basis of the row space of M (columns span range(M^T)).
Matrix rowspace_basis(const Matrix& m, double tol = -1.0);

}  // namespace lpvdda
