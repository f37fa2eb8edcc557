#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lpvdda/types.hpp"

namespace lpvdda {

/// Quadratic supply rate on stacked (u, y) samples, partitioned as
/// [[Q, S], [S^T, R]] with Q, R symmetric.
struct SupplyRate {
  Matrix Q, S, R;

  SupplyRate(Matrix q, Matrix s, Matrix r);

  int nu() const { return static_cast<int>(Q.rows()); }
  int ny() const { return static_cast<int>(R.rows()); }

  /// The full (nu+ny) x (nu+ny) supply matrix.
  Matrix full() const;
};

/// L2-gain supply (gamma^2 I, 0, -I). Requires gamma > 0.
SupplyRate l2_supply(double gamma, int n_u, int n_y);

/// Passivity supply (0, I, 0) for square systems.
SupplyRate passivity_supply(int n);

/// Per-dimension interval bound on the scheduling increment p_k - p_{k-1}.
struct RateBound {
  Vector lo, hi;
};

/// Axis-aligned box of admissible scheduling values, optionally rate-bounded.
struct BoxPolytope {
  Vector lo, hi;
  std::optional<RateBound> rate;
};

/// Explicit vertex list; optional rate polytope {d : A d <= b}.
struct VertexPolytope {
  std::vector<Vector> vertices;
  std::optional<Matrix> rate_A;
  std::optional<Vector> rate_b;
};

/// Ball ||p_k - nominal_k||_W <= p_max around a nominal trajectory.
/// Only the Euclidean norm (W = 2) is supported by the certification code.
struct QuadraticBall {
  Signal nominal;
  double p_max = 0.0;
  int norm = 2;
};

/// Admissible scheduling description: a polytope (box or vertex form,
/// optionally rate-bounded) or a quadratic ball around a nominal trajectory.
class SchedulingSet {
 public:
  explicit SchedulingSet(BoxPolytope box);
  explicit SchedulingSet(VertexPolytope poly);
  explicit SchedulingSet(QuadraticBall ball);

  static SchedulingSet box(const Vector& lo, const Vector& hi);
  static SchedulingSet box(double lo, double hi);  // scalar convenience
  SchedulingSet with_rate(const Vector& lo, const Vector& hi) const;
  SchedulingSet with_rate(double lo, double hi) const;

  int dim() const;
  bool is_polytopic() const;
  bool is_ball() const { return std::holds_alternative<QuadraticBall>(set_); }
  bool has_rate_bound() const;

  /// Vertices of the per-sample set P (boxes enumerate 2^{n_p} corners).
  std::vector<Vector> vertices() const;
  const BoxPolytope* as_box() const { return std::get_if<BoxPolytope>(&set_); }
  const VertexPolytope* as_vertex_polytope() const { return std::get_if<VertexPolytope>(&set_); }
  const QuadraticBall* as_ball() const { return std::get_if<QuadraticBall>(&set_); }

  bool contains(const Vector& p, double tol = 1e-9) const;

 private:
  std::variant<BoxPolytope, VertexPolytope, QuadraticBall> set_;
};

class LpvIoModel;

/// Past samples needed to start the recursion: y_{1-n_a..0}, p_{1-n_r..0},
/// u_{1-n_b..0}, each stored oldest-first.
struct InitialCondition {
  Signal past_y;
  Signal past_p;
  Signal past_u;

  static InitialCondition zero(const LpvIoModel& model);
};

/// Shifted-affine LPV input-output model
///   y_k + sum_{i=1..n_a} a_i(p_{k-i}) y_{k-i} = sum_{i=0..n_b} b_i(p_{k-i}) u_{k-i},
/// where a_i, b_i are affine in the scheduling sample at the same lag.
class LpvIoModel {
 public:
  /// a[i-1][j] is the (n_y x n_y) coefficient of p_j in a_i (j = 0 is the
  /// constant part); b[i][j] likewise (n_y x n_u), with i starting at 0.
  LpvIoModel(int n_u, int n_y, int n_p, std::vector<std::vector<Matrix>> a,
             std::vector<std::vector<Matrix>> b, std::optional<int> n_x = std::nullopt,
             std::optional<SchedulingSet> scheduling = std::nullopt);

  int nu() const { return nu_; }
  int ny() const { return ny_; }
  int np() const { return np_; }
  int na() const { return na_; }
  int nb() const { return nb_; }
  int nr() const { return nr_; }
  int nx() const { return nx_; }

  const SchedulingSet* scheduling() const { return scheduling_ ? &*scheduling_ : nullptr; }
  LpvIoModel with_scheduling(SchedulingSet s) const;

  /// a_i(p) for i in [1, n_a], with the convention p_0 = 1.
  Matrix coeff_a(int i, const Vector& p) const;
  /// b_i(p) for i in [0, n_b]. Indices beyond the stored order return zero.
  Matrix coeff_b(int i, const Vector& p) const;

  const std::vector<std::vector<Matrix>>& a() const { return a_; }
  const std::vector<std::vector<Matrix>>& b() const { return b_; }

 private:
  int nu_, ny_, np_, na_, nb_, nr_, nx_;
  std::vector<std::vector<Matrix>> a_, b_;
  std::optional<SchedulingSet> scheduling_;
};

/// Runs the IO recursion forward. u and p must have equal length; with
/// strict_scheduling, every p_k must lie in the model's scheduling set.
Signal simulate(const LpvIoModel& model, const Signal& u, const Signal& p,
                const InitialCondition& init, bool strict_scheduling = false);

/// Worst-sample residual of the difference equation along (u, p, y) with the
/// given initial condition. Zero (to rounding) iff the triple solves the model.
double equation_residual(const LpvIoModel& model, const Signal& u, const Signal& p,
                         const Signal& y, const InitialCondition& init);

/// State-space model with affine scheduling dependency,
/// M(p) = M0 + sum_j p_j Mp[j] for M in {A, B, C, D}.
struct LpvSsModel {
  Matrix A0, B0, C0, D0;
  std::vector<Matrix> Ap, Bp, Cp, Dp;

  int nx() const { return static_cast<int>(A0.rows()); }
  int nu() const { return static_cast<int>(B0.cols()); }
  int ny() const { return static_cast<int>(C0.rows()); }
  int np() const { return static_cast<int>(Ap.size()); }

  Matrix A(const Vector& p) const;
  Matrix B(const Vector& p) const;
  Matrix C(const Vector& p) const;
  Matrix D(const Vector& p) const;
};

/// Observable companion realization of a SISO model: A(p) carries -a_i(p) in
/// its first column and an identity superdiagonal, B_i(p) = b_i(p) - a_i(p) b_0(p),
/// C = e_1^T, D(p) = b_0(p). Throws for MIMO models and for models where
/// B(p) would not be affine (b_0 and some a_i both scheduling-dependent).
LpvSsModel realize_ss_siso(const LpvIoModel& model);

/// Forward recursion x_{k+1} = A(p_k) x_k + B(p_k) u_k, y_k = C(p_k) x_k + D(p_k) u_k.
std::pair<Signal, Signal> simulate_ss(const LpvSsModel& ss, const Signal& u, const Signal& p,
                                      const Vector& x0);

/// sin(t)/t with sinc(0) = 1; series evaluation near zero.
double sinc(double t);

}  // namespace lpvdda
