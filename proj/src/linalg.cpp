#include "lpvdda/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <stdexcept>

namespace lpvdda {

double default_rank_tol(const Matrix& m, double sigma_max) {
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("min_eigenvalue: non-square input");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool psd_check(const Matrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

namespace {

struct SvdSplit {
  Eigen::JacobiSVD<Matrix> svd;
  int rank;
};

SvdSplit full_svd(const Matrix& m, double tol) {
  SvdSplit out{Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV), 0};
  if (m.rows() == 0 || m.cols() == 0) return out;
  const auto& sv = out.svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cutoff = tol < 0.0 ? default_rank_tol(m, smax) : tol * smax;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++out.rank;
  return out;
}

}  // namespace

int numerical_rank(const Matrix& m, double tol) { return full_svd(m, tol).rank; }

Matrix nullspace_basis(const Matrix& m, double tol) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  auto s = full_svd(m, tol);
  return s.svd.matrixV().rightCols(m.cols() - s.rank);
}

Matrix rowspace_basis(const Matrix& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.cols(), 0);
  auto s = full_svd(m, tol);
  return s.svd.matrixV().leftCols(s.rank);
}

}  // namespace lpvdda
