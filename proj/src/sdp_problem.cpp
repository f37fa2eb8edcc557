#include "lpvdda/sdp.hpp"

#include <fstream>
#include <stdexcept>

namespace lpvdda {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::inaccurate: return "inaccurate";
    case SolveStatus::failed: return "failed";
  }
  return "?";
}

int SdpProblem::add_scalar(std::string name, double lower_bound) {
  lower_bounds_.push_back(lower_bound);
  objective_.push_back(0.0);
  names_.push_back(std::move(name));
  return num_scalars() - 1;
}

int SdpProblem::add_matrix(std::string name, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("add_matrix: bad shape");
  MatVarInfo info;
  info.rows = rows;
  info.cols = cols;
  info.first_scalar = num_scalars();
  info.name = name;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      add_scalar(name + "(" + std::to_string(r) + "," + std::to_string(c) + ")");
  matrices_.push_back(std::move(info));
  return num_matrix_vars() - 1;
}

int SdpProblem::scalar_of(int matrix_id, int r, int c) const {
  const auto& m = matrices_.at(matrix_id);
  if (r < 0 || r >= m.rows || c < 0 || c >= m.cols)
    throw std::out_of_range("scalar_of: index outside matrix variable");
  return m.first_scalar + r * m.cols + c;
}

int SdpProblem::add_constraint(Matrix G) {
  if (G.rows() != G.cols()) throw std::invalid_argument("add_constraint: G must be square");
  Block b;
  b.G = 0.5 * (G + G.transpose());
  blocks_.push_back(std::move(b));
  return num_constraints() - 1;
}

void SdpProblem::add_term(int constraint, int scalar_var, Matrix A) {
  auto& b = blocks_.at(constraint);
  if (A.rows() != b.dim() || A.cols() != b.dim())
    throw std::invalid_argument("add_term: coefficient dimension mismatch");
  if (scalar_var < 0 || scalar_var >= num_scalars())
    throw std::invalid_argument("add_term: unknown variable");
  for (auto& t : b.scalar_terms)
    if (t.var == scalar_var) {
      t.A += 0.5 * (A + A.transpose());
      return;
    }
  b.scalar_terms.push_back({scalar_var, 0.5 * (A + A.transpose())});
}

void SdpProblem::add_left_product(int constraint, int matrix_id, const Matrix& F, double coeff) {
  auto& b = blocks_.at(constraint);
  const auto& m = matrices_.at(matrix_id);
  if (F.rows() != m.cols || F.cols() != b.dim())
    throw std::invalid_argument("add_left_product: F must be cols(X) x dim");
  if (m.rows != b.dim())
    throw std::invalid_argument("add_left_product: rows(X) must equal the block dimension");
  for (auto& t : b.mat_terms)
    if (t.matrix_id == matrix_id) {
      t.F += coeff * F;
      return;
    }
  b.mat_terms.push_back({matrix_id, coeff * F});
}

void SdpProblem::set_objective(int scalar_var, double coeff) {
  objective_.at(scalar_var) = coeff;
}

int SdpProblem::lmi_count() const {
  int n = num_constraints();
  for (double lb : lower_bounds_)
    if (lb != kUnbounded) ++n;
  return n;
}

Matrix SdpProblem::matrix_value(const SolveResult& r, int matrix_id) const {
  const auto& m = matrices_.at(matrix_id);
  Matrix out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = r.values.at(scalar_of(matrix_id, i, j));
  return out;
}

void SdpProblem::write_sdpa(const std::filesystem::path& path) const {
  // minimize c^T y with blocks sum_i y_i F_i - F_0 >= 0, so F_0 = -G.
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_sdpa: cannot open " + path.string());
  const int m = num_scalars();
  int nblocks = 0;
  std::vector<int> sizes;
  for (const auto& b : blocks_) {
    sizes.push_back(b.dim());
    ++nblocks;
  }
  int nbounds = 0;
  for (double lb : lower_bounds_)
    if (lb != kUnbounded) ++nbounds;
  if (nbounds) {
    sizes.push_back(-nbounds);  // diagonal block
    ++nblocks;
  }
  os << m << "\n" << nblocks << "\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) os << sizes[i] << (i + 1 < sizes.size() ? " " : "\n");
  for (int i = 0; i < m; ++i) os << objective_[i] << (i + 1 < m ? " " : "\n");

  auto emit = [&os](int mat, int blk, int i, int j, double v) {
    if (v != 0.0 && i <= j) os << mat << " " << blk << " " << i + 1 << " " << j + 1 << " " << v << "\n";
  };
  for (int k = 0; k < num_constraints(); ++k) {
    const auto& b = blocks_[k];
    const int n = b.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) emit(0, k + 1, i, j, -b.G(i, j));
    for (const auto& t : b.scalar_terms)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) emit(t.var + 1, k + 1, i, j, t.A(i, j));
    for (const auto& t : b.mat_terms) {
      const auto& mv = matrices_[t.matrix_id];
      // sym(X F): variable X(a,c) has coefficient e_a f_c^T + f_c e_a^T.
      for (int a = 0; a < mv.rows; ++a)
        for (int c = 0; c < mv.cols; ++c) {
          const int var = scalar_of(t.matrix_id, a, c) + 1;
          for (int j = 0; j < n; ++j) {
            const double fv = t.F(c, j);
            if (fv == 0.0) continue;
            if (a == j)
              emit(var, k + 1, a, j, 2.0 * fv);  // (e_a f^T + f e_a^T)(a,a) = 2 f_a
            else if (a < j)
              emit(var, k + 1, a, j, fv);
            else
              emit(var, k + 1, j, a, fv);
          }
        }
    }
  }
  if (nbounds) {
    int d = 0;
    for (int v = 0; v < m; ++v) {
      if (lower_bounds_[v] == kUnbounded) continue;
      emit(0, nblocks, d, d, lower_bounds_[v]);
      emit(v + 1, nblocks, d, d, 1.0);
      ++d;
    }
  }
}

}  // namespace lpvdda
