#include "lpvdda/model.hpp"

#include <cmath>

namespace lpvdda {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " must be square");
}

}  // namespace

SupplyRate::SupplyRate(Matrix q, Matrix s, Matrix r) : Q(std::move(q)), S(std::move(s)), R(std::move(r)) {
  check_square(Q, "Q");
  check_square(R, "R");
  if (S.rows() != Q.rows() || S.cols() != R.rows())
    throw std::invalid_argument("S must be n_u x n_y");
  Q = symmetrized(Q);
  R = symmetrized(R);
}

Matrix SupplyRate::full() const {
  Matrix pi(nu() + ny(), nu() + ny());
  pi.topLeftCorner(nu(), nu()) = Q;
  pi.topRightCorner(nu(), ny()) = S;
  pi.bottomLeftCorner(ny(), nu()) = S.transpose();
  pi.bottomRightCorner(ny(), ny()) = R;
  return pi;
}

SupplyRate l2_supply(double gamma, int n_u, int n_y) {
  if (gamma <= 0.0) throw std::invalid_argument("l2_supply: gamma must be positive");
  return SupplyRate(gamma * gamma * Matrix::Identity(n_u, n_u), Matrix::Zero(n_u, n_y),
                    -Matrix::Identity(n_y, n_y));
}

SupplyRate passivity_supply(int n) {
  return SupplyRate(Matrix::Zero(n, n), Matrix::Identity(n, n), Matrix::Zero(n, n));
}

SchedulingSet::SchedulingSet(BoxPolytope box) : set_(std::move(box)) {
  const auto& b = std::get<BoxPolytope>(set_);
  if (b.lo.size() != b.hi.size() || b.lo.size() == 0)
    throw std::invalid_argument("box: lo/hi size mismatch");
  if ((b.hi - b.lo).minCoeff() < 0.0) throw std::invalid_argument("box: empty interval");
  if (b.rate && (b.rate->lo.size() != b.lo.size() || b.rate->hi.size() != b.lo.size()))
    throw std::invalid_argument("box: rate bound dimension mismatch");
}

SchedulingSet::SchedulingSet(VertexPolytope poly) : set_(std::move(poly)) {
  const auto& v = std::get<VertexPolytope>(set_);
  if (v.vertices.empty()) throw std::invalid_argument("vertex polytope: no vertices");
  const Eigen::Index d = v.vertices.front().size();
  for (const auto& p : v.vertices)
    if (p.size() != d) throw std::invalid_argument("vertex polytope: mixed dimensions");
  if (v.rate_A.has_value() != v.rate_b.has_value())
    throw std::invalid_argument("vertex polytope: rate polytope needs both A and b");
}

SchedulingSet::SchedulingSet(QuadraticBall ball) : set_(std::move(ball)) {
  const auto& q = std::get<QuadraticBall>(set_);
  if (q.p_max <= 0.0) throw std::invalid_argument("quadratic ball: p_max must be positive");
  if (q.nominal.empty()) throw std::invalid_argument("quadratic ball: empty nominal trajectory");
  if (q.norm != 2) throw std::invalid_argument("quadratic ball: only the 2-norm is supported");
}

SchedulingSet SchedulingSet::box(const Vector& lo, const Vector& hi) {
  return SchedulingSet(BoxPolytope{lo, hi, std::nullopt});
}

SchedulingSet SchedulingSet::box(double lo, double hi) { return box(scalar(lo), scalar(hi)); }

SchedulingSet SchedulingSet::with_rate(const Vector& lo, const Vector& hi) const {
  const auto* b = as_box();
  if (!b) throw std::invalid_argument("with_rate: rate intervals apply to box sets");
  BoxPolytope out = *b;
  out.rate = RateBound{lo, hi};
  return SchedulingSet(out);
}

SchedulingSet SchedulingSet::with_rate(double lo, double hi) const {
  return with_rate(scalar(lo), scalar(hi));
}

int SchedulingSet::dim() const {
  if (const auto* b = as_box()) return static_cast<int>(b->lo.size());
  if (const auto* v = as_vertex_polytope()) return static_cast<int>(v->vertices.front().size());
  return static_cast<int>(as_ball()->nominal.front().size());
}

bool SchedulingSet::is_polytopic() const { return !is_ball(); }

bool SchedulingSet::has_rate_bound() const {
  if (const auto* b = as_box()) return b->rate.has_value();
  if (const auto* v = as_vertex_polytope()) return v->rate_A.has_value();
  return false;
}

std::vector<Vector> SchedulingSet::vertices() const {
  if (const auto* v = as_vertex_polytope()) return v->vertices;
  const auto* b = as_box();
  if (!b) throw std::invalid_argument("vertices: quadratic-ball sets have no vertex list");
  const int d = dim();
  std::vector<Vector> out;
  out.reserve(std::size_t(1) << d);
  for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
    Vector p(d);
    for (int j = 0; j < d; ++j) p(j) = (mask >> j) & 1 ? b->hi(j) : b->lo(j);
    out.push_back(p);
  }
  return out;
}

bool SchedulingSet::contains(const Vector& p, double tol) const {
  if (p.size() != dim()) return false;
  if (const auto* b = as_box())
    return (p - b->lo).minCoeff() >= -tol && (b->hi - p).minCoeff() >= -tol;
  if (const auto* q = as_ball()) {
    // Per-sample membership against the nearest nominal value.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& nom : q->nominal) best = std::min(best, (p - nom).norm());
    return best <= q->p_max + tol;
  }
  // Vertex polytope: conservative bounding-box test; exact membership would
  // need an LP and is not required by the callers.
  const auto& verts = as_vertex_polytope()->vertices;
  Vector lo = verts.front(), hi = verts.front();
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (p - lo).minCoeff() >= -tol && (hi - p).minCoeff() >= -tol;
}

InitialCondition InitialCondition::zero(const LpvIoModel& model) {
  InitialCondition ic;
  ic.past_y.assign(model.na(), Vector::Zero(model.ny()));
  ic.past_p.assign(model.nr(), Vector::Zero(model.np()));
  ic.past_u.assign(model.nb(), Vector::Zero(model.nu()));
  return ic;
}

LpvIoModel::LpvIoModel(int n_u, int n_y, int n_p, std::vector<std::vector<Matrix>> a,
                       std::vector<std::vector<Matrix>> b, std::optional<int> n_x,
                       std::optional<SchedulingSet> scheduling)
    : nu_(n_u), ny_(n_y), np_(n_p), a_(std::move(a)), b_(std::move(b)),
      scheduling_(std::move(scheduling)) {
  if (nu_ < 1 || ny_ < 1 || np_ < 1) throw std::invalid_argument("model: channel counts must be positive");
  na_ = static_cast<int>(a_.size());
  nb_ = static_cast<int>(b_.size()) - 1;
  if (na_ < 1) throw std::invalid_argument("model: n_a >= 1 required");
  if (nb_ < 0) throw std::invalid_argument("model: b table must contain b_0");
  nr_ = std::max(na_, nb_);
  for (const auto& row : a_) {
    if (static_cast<int>(row.size()) != np_ + 1) throw std::invalid_argument("model: a row needs n_p+1 matrices");
    for (const auto& m : row)
      if (m.rows() != ny_ || m.cols() != ny_) throw std::invalid_argument("model: a matrix must be n_y x n_y");
  }
  for (const auto& row : b_) {
    if (static_cast<int>(row.size()) != np_ + 1) throw std::invalid_argument("model: b row needs n_p+1 matrices");
    for (const auto& m : row)
      if (m.rows() != ny_ || m.cols() != nu_) throw std::invalid_argument("model: b matrix must be n_y x n_u");
  }
  if (n_x) {
    nx_ = *n_x;
    const bool siso = nu_ == 1 && ny_ == 1;
    if (siso && nx_ != nr_) throw std::invalid_argument("model: SISO systems have n_x = n_r");
    if (!siso && nx_ < nr_) throw std::invalid_argument("model: n_x >= n_r required");
  } else {
    nx_ = nr_;  // exact for SISO, minimal admissible declaration otherwise
  }
  if (scheduling_ && scheduling_->dim() != np_)
    throw std::invalid_argument("model: scheduling set dimension mismatch");
}

LpvIoModel LpvIoModel::with_scheduling(SchedulingSet s) const {
  LpvIoModel out = *this;
  if (s.dim() != np_) throw std::invalid_argument("with_scheduling: dimension mismatch");
  out.scheduling_ = std::move(s);
  return out;
}

namespace {
Matrix eval_affine(const std::vector<Matrix>& row, const Vector& p) {
  Matrix m = row[0];
  for (int j = 0; j < p.size(); ++j) m += p(j) * row[j + 1];
  return m;
}
}  // namespace

Matrix LpvIoModel::coeff_a(int i, const Vector& p) const {
  if (i < 1 || i > na_) throw std::out_of_range("coeff_a: index outside [1, n_a]");
  if (p.size() != np_) throw std::invalid_argument("coeff_a: scheduling dimension mismatch");
  return eval_affine(a_[i - 1], p);
}

Matrix LpvIoModel::coeff_b(int i, const Vector& p) const {
  if (i < 0 || i > nr_) throw std::out_of_range("coeff_b: index outside [0, n_r]");
  if (p.size() != np_) throw std::invalid_argument("coeff_b: scheduling dimension mismatch");
  if (i > nb_) return Matrix::Zero(ny_, nu_);
  return eval_affine(b_[i], p);
}

Signal simulate(const LpvIoModel& model, const Signal& u, const Signal& p,
                const InitialCondition& init, bool strict_scheduling) {
  if (u.size() != p.size()) throw std::invalid_argument("simulate: len(u) != len(p)");
  if (static_cast<int>(init.past_y.size()) != model.na() ||
      static_cast<int>(init.past_p.size()) != model.nr() ||
      static_cast<int>(init.past_u.size()) != model.nb())
    throw std::invalid_argument("simulate: initial condition lengths mismatch");
  const int T = static_cast<int>(u.size());
  if (strict_scheduling && model.scheduling())
    for (const auto& pk : p)
      if (!model.scheduling()->contains(pk))
        throw std::invalid_argument("simulate: scheduling sample outside declared set");

  Signal y(T);
  // j is a 0-based time index; j < 0 reads the initial condition.
  auto y_at = [&](int j) -> const Vector& { return j >= 0 ? y[j] : init.past_y[model.na() + j]; };
  auto u_at = [&](int j) -> const Vector& { return j >= 0 ? u[j] : init.past_u[model.nb() + j]; };
  auto p_at = [&](int j) -> const Vector& { return j >= 0 ? p[j] : init.past_p[model.nr() + j]; };

  for (int k = 0; k < T; ++k) {
    Vector acc = Vector::Zero(model.ny());
    for (int i = 1; i <= model.na(); ++i) acc -= model.coeff_a(i, p_at(k - i)) * y_at(k - i);
    for (int i = 0; i <= model.nb(); ++i) acc += model.coeff_b(i, p_at(k - i)) * u_at(k - i);
    y[k] = acc;
  }
  return y;
}

double equation_residual(const LpvIoModel& model, const Signal& u, const Signal& p,
                         const Signal& y, const InitialCondition& init) {
  if (u.size() != p.size() || u.size() != y.size())
    throw std::invalid_argument("equation_residual: length mismatch");
  const int T = static_cast<int>(u.size());
  auto y_at = [&](int j) -> const Vector& { return j >= 0 ? y[j] : init.past_y[model.na() + j]; };
  auto u_at = [&](int j) -> const Vector& { return j >= 0 ? u[j] : init.past_u[model.nb() + j]; };
  auto p_at = [&](int j) -> const Vector& { return j >= 0 ? p[j] : init.past_p[model.nr() + j]; };
  double worst = 0.0;
  for (int k = 0; k < T; ++k) {
    Vector lhs = y[k];
    for (int i = 1; i <= model.na(); ++i) lhs += model.coeff_a(i, p_at(k - i)) * y_at(k - i);
    for (int i = 0; i <= model.nb(); ++i) lhs -= model.coeff_b(i, p_at(k - i)) * u_at(k - i);
    worst = std::max(worst, lhs.cwiseAbs().maxCoeff());
  }
  return worst;
}

Matrix LpvSsModel::A(const Vector& p) const {
  Matrix m = A0;
  for (int j = 0; j < p.size(); ++j) m += p(j) * Ap[j];
  return m;
}
Matrix LpvSsModel::B(const Vector& p) const {
  Matrix m = B0;
  for (int j = 0; j < p.size(); ++j) m += p(j) * Bp[j];
  return m;
}
Matrix LpvSsModel::C(const Vector& p) const {
  Matrix m = C0;
  for (int j = 0; j < p.size(); ++j) m += p(j) * Cp[j];
  return m;
}
Matrix LpvSsModel::D(const Vector& p) const {
  Matrix m = D0;
  for (int j = 0; j < p.size(); ++j) m += p(j) * Dp[j];
  return m;
}

LpvSsModel realize_ss_siso(const LpvIoModel& model) {
  if (model.nu() != 1 || model.ny() != 1)
    throw std::invalid_argument("realize_ss_siso: MIMO realization is not supported");
  const int n = model.nr();
  const int np = model.np();

  auto a_coef = [&](int i, int j) -> double {
    return i <= model.na() ? model.a()[i - 1][j](0, 0) : 0.0;
  };
  auto b_coef = [&](int i, int j) -> double {
    return i <= model.nb() ? model.b()[i][j](0, 0) : 0.0;
  };

  bool b0_varies = false, a_varies = false;
  for (int j = 1; j <= np; ++j) {
    if (b_coef(0, j) != 0.0) b0_varies = true;
    for (int i = 1; i <= n; ++i)
      if (a_coef(i, j) != 0.0) a_varies = true;
  }
  if (b0_varies && a_varies)
    throw std::invalid_argument(
        "realize_ss_siso: B(p) = b_i(p) - a_i(p) b_0(p) is not affine when both b_0 and a_i "
        "depend on the scheduling");

  LpvSsModel ss;
  ss.A0 = Matrix::Zero(n, n);
  ss.B0 = Matrix::Zero(n, 1);
  ss.C0 = Matrix::Zero(1, n);
  ss.D0 = Matrix::Zero(1, 1);
  ss.Ap.assign(np, Matrix::Zero(n, n));
  ss.Bp.assign(np, Matrix::Zero(n, 1));
  ss.Cp.assign(np, Matrix::Zero(1, n));
  ss.Dp.assign(np, Matrix::Zero(1, 1));

  for (int i = 1; i <= n; ++i) {
    ss.A0(i - 1, 0) = -a_coef(i, 0);
    for (int j = 1; j <= np; ++j) ss.Ap[j - 1](i - 1, 0) = -a_coef(i, j);
  }
  ss.A0.topRightCorner(n - 1, n - 1).setIdentity();
  ss.C0(0, 0) = 1.0;
  ss.D0(0, 0) = b_coef(0, 0);
  for (int j = 1; j <= np; ++j) ss.Dp[j - 1](0, 0) = b_coef(0, j);

  // B_i(p) = b_i(p) - a_i(p) b_0(p); affine since at most one factor varies.
  for (int i = 1; i <= n; ++i) {
    ss.B0(i - 1, 0) = b_coef(i, 0) - a_coef(i, 0) * b_coef(0, 0);
    for (int j = 1; j <= np; ++j)
      ss.Bp[j - 1](i - 1, 0) =
          b_coef(i, j) - a_coef(i, j) * b_coef(0, 0) - a_coef(i, 0) * b_coef(0, j);
  }
  return ss;
}

std::pair<Signal, Signal> simulate_ss(const LpvSsModel& ss, const Signal& u, const Signal& p,
                                      const Vector& x0) {
  if (u.size() != p.size()) throw std::invalid_argument("simulate_ss: len(u) != len(p)");
  if (x0.size() != ss.nx()) throw std::invalid_argument("simulate_ss: x0 dimension mismatch");
  const int T = static_cast<int>(u.size());
  Signal xs(T), ys(T);
  Vector x = x0;
  for (int k = 0; k < T; ++k) {
    xs[k] = x;
    ys[k] = ss.C(p[k]) * x + ss.D(p[k]) * u[k];
    x = ss.A(p[k]) * x + ss.B(p[k]) * u[k];
  }
  return {xs, ys};
}

double sinc(double t) {
  if (std::abs(t) < 1e-6) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}

}  // namespace lpvdda
