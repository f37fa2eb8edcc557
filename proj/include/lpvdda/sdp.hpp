#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "lpvdda/types.hpp"

namespace lpvdda {

enum class SolveStatus { optimal, feasible, infeasible, inaccurate, failed };

const char* to_string(SolveStatus s);

struct SolverOptions {
  int max_iterations = 120;
  double residual_tol = 1e-8;   // relative residual/gap target for `optimal`
  double accept_tol = 1e-6;     // looser threshold for `feasible`
  double psd_slack_tol = 1e-6;  // eigenvalue slack accepted in verdicts
  double step_fraction = 0.98;
  bool verbose = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::failed;
  std::vector<double> values;  // one entry per registered scalar variable
  double objective = 0.0;
  double primal_residual = 0.0;  // constraint (slack) residual, relative
  double dual_residual = 0.0;    // stationarity residual, relative
  double gap = 0.0;              // relative duality gap
  int iterations = 0;
  double wall_time_s = 0.0;
  std::string message;

  bool usable() const { return status == SolveStatus::optimal || status == SolveStatus::feasible; }
};

/// Linear-matrix-inequality model
///   minimize c^T y  s.t.  G_k + sum_i y_i A_{k,i} + sum_m sym(X_m F_{k,m}) >= 0
/// over scalar variables y (optionally bounded below) and matrix variables X.
/// Matrix variables are registered entrywise as scalar variables; the
/// structured sym(X F) terms exist so the solver can exploit their form.
class SdpProblem {
 public:
  static constexpr double kUnbounded = -std::numeric_limits<double>::infinity();

  int add_scalar(std::string name, double lower_bound = kUnbounded);
  /// Registers rows*cols scalar variables (row-major) and returns a matrix id.
  int add_matrix(std::string name, int rows, int cols);
  int scalar_of(int matrix_id, int r, int c) const;

  /// New constraint G + ... >= 0; returns its index. G is symmetrized.
  int add_constraint(Matrix G);
  /// Adds y * A to a constraint (A symmetrized).
  void add_term(int constraint, int scalar_var, Matrix A);
  /// Adds coeff * (X F + F^T X^T); F must be (cols(X) x dim). At most one
  /// accumulated term per matrix variable per constraint.
  void add_left_product(int constraint, int matrix_id, const Matrix& F, double coeff = 1.0);

  /// Objective coefficient for `minimize`; default 0 for every variable.
  void set_objective(int scalar_var, double coeff);

  int num_scalars() const { return static_cast<int>(lower_bounds_.size()); }
  int num_constraints() const { return static_cast<int>(blocks_.size()); }
  int num_matrix_vars() const { return static_cast<int>(matrices_.size()); }

  /// Total LMI count including bound blocks, and total scalar variable count.
  int lmi_count() const;
  int variable_count() const { return num_scalars(); }

  Matrix matrix_value(const SolveResult& r, int matrix_id) const;

  /// Debug dump in sparse SDPA format (structured terms expanded entrywise).
  void write_sdpa(const std::filesystem::path& path) const;

  struct MatVarInfo {
    std::string name;
    int rows = 0, cols = 0;
    int first_scalar = 0;
  };
  struct ScalarTerm {
    int var;
    Matrix A;
  };
  struct MatTerm {
    int matrix_id;
    Matrix F;  // coeff already folded in
  };
  struct Block {
    Matrix G;
    std::vector<ScalarTerm> scalar_terms;
    std::vector<MatTerm> mat_terms;
    int dim() const { return static_cast<int>(G.rows()); }
  };

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<double>& lower_bounds() const { return lower_bounds_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<MatVarInfo>& matrices() const { return matrices_; }
  const std::string& scalar_name(int i) const { return names_[i]; }

 private:
  std::vector<double> lower_bounds_;
  std::vector<double> objective_;
  std::vector<std::string> names_;
  std::vector<MatVarInfo> matrices_;
  std::vector<Block> blocks_;
};

/// Interior-point solve (Nesterov-Todd scaling, predictor-corrector).
/// Deterministic for fixed inputs and options.
SolveResult solve(const SdpProblem& problem, const SolverOptions& options = {});

}  // namespace lpvdda
