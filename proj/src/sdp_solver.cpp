#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lpvdda/sdp.hpp"

namespace lpvdda {

namespace {

// Internal normalized block: G + sum_i y_i A_i + sum_t sym(Xhat_t F_t) >= 0.
struct IBlock {
  int n = 0;
  Matrix G;
  std::vector<std::pair<int, Matrix>> scalar_terms;  // (var, A)
  struct MTerm {
    int first_scalar;  // row-major entries of the matrix variable
    int rows, cols;    // rows == n
    Matrix F;          // cols x n
  };
  std::vector<MTerm> mat_terms;

  // Iterates and per-iteration scratch.
  Matrix X, Z, W, Zinv;
  std::vector<Matrix> FW;   // per mat term, cols x n
  std::vector<Matrix> Bsc;  // per scalar term, W A W
  Matrix Rd, Mrhs;
  Matrix dX, dZ, dXa, dZa;
};

Matrix gather_matvar(const std::vector<double>& y, const IBlock::MTerm& t) {
  Matrix X(t.rows, t.cols);
  for (int r = 0; r < t.rows; ++r)
    for (int c = 0; c < t.cols; ++c) X(r, c) = y[t.first_scalar + r * t.cols + c];
  return X;
}

// S(y) - G (the variable part of the slack).
Matrix eval_linear(const IBlock& b, const std::vector<double>& y) {
  Matrix S = Matrix::Zero(b.n, b.n);
  for (const auto& [v, A] : b.scalar_terms) S += y[v] * A;
  for (const auto& t : b.mat_terms) {
    const Matrix Xh = gather_matvar(y, t);
    const Matrix XF = Xh * t.F;
    S += XF + XF.transpose();
  }
  return S;
}

// rhs += adjoint of the block map applied to M (symmetric), scaled by `scale`.
void accumulate_adjoint(const IBlock& b, const Matrix& M, double scale,
                        std::vector<double>& out) {
  for (const auto& [v, A] : b.scalar_terms) out[v] += scale * (A.array() * M.array()).sum();
  for (const auto& t : b.mat_terms) {
    const Matrix MF = M * t.F.transpose();  // n x cols
    for (int r = 0; r < t.rows; ++r)
      for (int c = 0; c < t.cols; ++c) out[t.first_scalar + r * t.cols + c] += scale * 2.0 * MF(r, c);
  }
}

// Largest step in [0, cap] keeping X + alpha * dX PSD.
double max_step(const Matrix& X, const Matrix& dX, double cap) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix L = llt.matrixL();
  Matrix Mt = L.triangularView<Eigen::Lower>().solve(dX);
  Mt = L.triangularView<Eigen::Lower>().solve(Mt.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Mt + Mt.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return cap;
  return std::min(cap, -1.0 / lmin);
}

struct Metrics {
  double pinf = 0, dinf = 0, gap = 0, compl_rel = 0, mu = 0, pobj = 0, dobj = 0;
  double merit() const { return std::max({pinf, dinf, compl_rel}); }
};

}  // namespace

SolveResult solve(const SdpProblem& problem, const SolverOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  const int m = problem.num_scalars();
  SolveResult res;
  if (m == 0 || problem.num_constraints() == 0) {
    res.message = "empty problem";
    return res;
  }

  // Build internal blocks: user constraints plus 1x1 bound blocks, each
  // normalized by its largest coefficient norm.
  std::vector<IBlock> blocks;
  std::vector<bool> touched(m, false);
  for (const auto& ub : problem.blocks()) {
    IBlock b;
    b.n = ub.dim();
    double scale = std::max(1.0, ub.G.norm());
    for (const auto& t : ub.scalar_terms) scale = std::max(scale, t.A.norm());
    for (const auto& t : ub.mat_terms) scale = std::max(scale, 2.0 * t.F.norm());
    b.G = ub.G / scale;
    for (const auto& t : ub.scalar_terms) {
      b.scalar_terms.emplace_back(t.var, t.A / scale);
      touched[t.var] = true;
    }
    for (const auto& t : ub.mat_terms) {
      const auto& mv = problem.matrices()[t.matrix_id];
      IBlock::MTerm mt{mv.first_scalar, mv.rows, mv.cols, t.F / scale};
      for (int i = 0; i < mv.rows * mv.cols; ++i) touched[mv.first_scalar + i] = true;
      b.mat_terms.push_back(std::move(mt));
    }
    blocks.push_back(std::move(b));
  }
  for (int v = 0; v < m; ++v) {
    const double lb = problem.lower_bounds()[v];
    if (lb == SdpProblem::kUnbounded) continue;
    IBlock b;
    b.n = 1;
    b.G = Matrix::Constant(1, 1, -lb);
    b.scalar_terms.emplace_back(v, Matrix::Identity(1, 1));
    touched[v] = true;
    blocks.push_back(std::move(b));
  }
  for (int v = 0; v < m; ++v)
    if (!touched[v])
      throw std::invalid_argument("solve: variable '" + problem.scalar_name(v) +
                                  "' appears in no constraint or bound");

  const std::vector<double>& c = problem.objective();
  double ntot = 0;
  double Gnorm2 = 0;
  for (auto& b : blocks) {
    ntot += b.n;
    Gnorm2 += b.G.squaredNorm();
  }
  const double Gnorm = std::sqrt(Gnorm2);
  double cnorm = 0;
  for (double ci : c) cnorm += ci * ci;
  cnorm = std::sqrt(cnorm);

  std::vector<double> y(m, 0.0);
  for (auto& b : blocks) {
    const double xi = std::max(10.0, std::sqrt(double(b.n)));
    b.X = xi * Matrix::Identity(b.n, b.n);
    b.Z = xi * Matrix::Identity(b.n, b.n);
  }

  Matrix H(m, m);
  Eigen::LDLT<Matrix> Hfact;
  std::vector<double> best_y = y;
  double best_merit = std::numeric_limits<double>::infinity();
  Metrics best_metrics;
  int stall = 0;

  auto compute_metrics = [&](Metrics& mm) {
    double rd2 = 0;
    mm.pobj = 0;
    for (int i = 0; i < m; ++i) mm.pobj += c[i] * y[i];
    mm.dobj = 0;
    double xz = 0;
    std::vector<double> Astar(m, 0.0);
    for (auto& b : blocks) {
      b.Rd = b.G + eval_linear(b, y) - b.Z;
      rd2 += b.Rd.squaredNorm();
      mm.dobj -= (b.G.array() * b.X.array()).sum();
      xz += (b.X.array() * b.Z.array()).sum();
      accumulate_adjoint(b, b.X, 1.0, Astar);
    }
    double rp2 = 0;
    for (int i = 0; i < m; ++i) {
      const double r = c[i] - Astar[i];
      rp2 += r * r;
    }
    mm.pinf = std::sqrt(rd2) / (1.0 + Gnorm);
    mm.dinf = std::sqrt(rp2) / (1.0 + cnorm);
    mm.mu = xz / ntot;
    const double den = 1.0 + std::abs(mm.pobj) + std::abs(mm.dobj);
    mm.gap = std::abs(mm.pobj - mm.dobj) / den;
    mm.compl_rel = xz / den;

    // Farkas-type certificate: X >= 0 with A*(X) ~ 0 and <G, X> < 0 proves
    // the LMI system infeasible.
    double xnorm = 0;
    for (auto& b : blocks) xnorm += b.X.squaredNorm();
    xnorm = std::sqrt(xnorm);
    if (xnorm > 1e6) {
      double an = 0;
      for (int i = 0; i < m; ++i) an += Astar[i] * Astar[i];
      if (std::sqrt(an) / xnorm < 1e-9 && -mm.dobj / xnorm < -1e-9) return true;
    }
    return false;
  };

  Metrics mm;
  std::vector<double> rhs(m), dy(m);
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    const bool infeas_cert = compute_metrics(mm);
    if (opt.verbose)
      std::printf("iter %3d  pobj % .6e dobj % .6e pinf %.2e dinf %.2e compl %.2e\n", iter,
                  mm.pobj, mm.dobj, mm.pinf, mm.dinf, mm.compl_rel);
    if (mm.merit() < best_merit) {
      if (mm.merit() < 0.9 * best_merit) stall = 0;
      best_merit = mm.merit();
      best_y = y;
      best_metrics = mm;
    } else {
      ++stall;
    }
    if (mm.merit() <= opt.residual_tol) break;
    if (infeas_cert) {
      res.status = SolveStatus::infeasible;
      res.message = "Farkas-type dual certificate found";
      break;
    }
    if (stall > 15) {
      res.message = "progress stalled";
      break;
    }

    // NT scaling per block.
    bool scaling_ok = true;
    for (auto& b : blocks) {
      Eigen::LLT<Matrix> lltx(b.X), lltz(b.Z);
      if (lltx.info() != Eigen::Success || lltz.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const Matrix Lx = lltx.matrixL();
      Eigen::SelfAdjointEigenSolver<Matrix> es(Lx.transpose() * b.Z * Lx);
      if (es.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      Vector lam = es.eigenvalues().cwiseMax(1e-300);
      const Matrix LQ = Lx * es.eigenvectors();
      b.W = LQ * lam.cwiseSqrt().cwiseInverse().asDiagonal() * LQ.transpose();
      b.Zinv = lltz.solve(Matrix::Identity(b.n, b.n));
      b.FW.clear();
      b.Bsc.clear();
      for (const auto& t : b.mat_terms) b.FW.push_back(t.F * b.W);
      for (const auto& [v, A] : b.scalar_terms) b.Bsc.push_back(b.W * A * b.W);
    }
    if (!scaling_ok) {
      res.message = "lost positive definiteness of an iterate";
      break;
    }

    // Schur complement H_ij = sum_k <A_i, W A_j W> (upper triangle).
    H.setZero();
    auto add_upper = [&](int r, int cidx, double v) {
      if (r <= cidx)
        H(r, cidx) += v;
      else
        H(cidx, r) += v;
    };
    for (auto& b : blocks) {
      const int nsc = static_cast<int>(b.scalar_terms.size());
      for (int i = 0; i < nsc; ++i) {
        const int vi = b.scalar_terms[i].first;
        for (int j = i; j < nsc; ++j)
          add_upper(vi, b.scalar_terms[j].first,
                    (b.Bsc[i].array() * b.scalar_terms[j].second.array()).sum());
        for (std::size_t t = 0; t < b.mat_terms.size(); ++t) {
          const auto& mt = b.mat_terms[t];
          const Matrix Mi = b.Bsc[i] * mt.F.transpose();  // n x cols
          for (int r = 0; r < mt.rows; ++r)
            for (int cc = 0; cc < mt.cols; ++cc)
              add_upper(vi, mt.first_scalar + r * mt.cols + cc, 2.0 * Mi(r, cc));
        }
      }
      // Matrix-variable pairs; iterate with the lower variable offset as rows.
      for (std::size_t s = 0; s < b.mat_terms.size(); ++s) {
        for (std::size_t t = s; t < b.mat_terms.size(); ++t) {
          std::size_t rs = s, ct = t;
          if (b.mat_terms[ct].first_scalar < b.mat_terms[rs].first_scalar) std::swap(rs, ct);
          const auto& mr = b.mat_terms[rs];
          const auto& mc = b.mat_terms[ct];
          const Matrix& FWr = b.FW[rs];
          const Matrix& FWc = b.FW[ct];
          const Matrix Grc = FWr * mc.F.transpose();  // q_r x q_c
          const int qr = mr.cols, qc = mc.cols;
          if (rs == ct) {
            for (int a = 0; a < b.n; ++a) {
              auto diag = H.block(mr.first_scalar + a * qr, mr.first_scalar + a * qr, qr, qr);
              diag.noalias() += 2.0 * (FWr.col(a) * FWr.col(a).transpose());
              diag.noalias() += (2.0 * b.W(a, a)) * Grc;
              for (int cc = a + 1; cc < b.n; ++cc) {
                auto tile = H.block(mr.first_scalar + a * qr, mr.first_scalar + cc * qr, qr, qr);
                tile.noalias() += 2.0 * (FWr.col(cc) * FWr.col(a).transpose());
                tile.noalias() += (2.0 * b.W(a, cc)) * Grc;
              }
            }
          } else {
            for (int a = 0; a < b.n; ++a)
              for (int cc = 0; cc < b.n; ++cc) {
                auto tile = H.block(mr.first_scalar + a * qr, mc.first_scalar + cc * qc, qr, qc);
                tile.noalias() += 2.0 * (FWr.col(cc) * FWc.col(a).transpose());
                tile.noalias() += (2.0 * b.W(a, cc)) * Grc;
              }
          }
        }
      }
    }
    {
      double dmax = 0;
      for (int i = 0; i < m; ++i) dmax = std::max(dmax, H(i, i));
      const double ridge = std::max(1e-13 * dmax, 1e-300);
      for (int i = 0; i < m; ++i) H(i, i) += ridge;
    }
    H.triangularView<Eigen::Lower>() = H.transpose().triangularView<Eigen::Lower>();
    Hfact.compute(H);
    if (Hfact.info() != Eigen::Success) {
      res.message = "Schur complement factorization failed";
      break;
    }

    std::vector<double> rp(m);
    {
      std::vector<double> Astar(m, 0.0);
      for (auto& b : blocks) accumulate_adjoint(b, b.X, 1.0, Astar);
      for (int i = 0; i < m; ++i) rp[i] = c[i] - Astar[i];
    }

    auto solve_direction = [&](bool corrector, double sigmu) {
      std::fill(rhs.begin(), rhs.end(), 0.0);
      for (auto& b : blocks) {
        b.Mrhs = -b.X - b.W * b.Rd * b.W;
        if (corrector) {
          b.Mrhs += sigmu * b.Zinv;
          const Matrix T = b.dXa * b.dZa * b.Zinv;
          b.Mrhs -= 0.5 * (T + T.transpose());
        }
        accumulate_adjoint(b, b.Mrhs, 1.0, rhs);
      }
      for (int i = 0; i < m; ++i) rhs[i] -= rp[i];
      Eigen::Map<Vector> rhsv(rhs.data(), m);
      Vector dyv = Hfact.solve(rhsv);
      for (int i = 0; i < m; ++i) dy[i] = dyv(i);
      for (auto& b : blocks) {
        b.dZ = eval_linear(b, dy) + b.Rd;
        b.dX = b.Mrhs - b.W * b.dZ * b.W;
      }
    };

    // Predictor.
    solve_direction(false, 0.0);
    double ax = 1.0, az = 1.0;
    for (auto& b : blocks) {
      ax = std::min(ax, opt.step_fraction * max_step(b.X, b.dX, 1.0 / opt.step_fraction));
      az = std::min(az, opt.step_fraction * max_step(b.Z, b.dZ, 1.0 / opt.step_fraction));
    }
    double mu_aff = 0;
    for (auto& b : blocks)
      mu_aff += ((b.X + ax * b.dX).array() * (b.Z + az * b.dZ).array()).sum();
    mu_aff = std::max(mu_aff / ntot, 0.0);
    double sigma = std::pow(mu_aff / std::max(mm.mu, 1e-300), 3.0);
    sigma = std::min(1.0, std::max(sigma, 1e-10));

    // Corrector (reuses the factorization).
    for (auto& b : blocks) {
      b.dXa = b.dX;
      b.dZa = b.dZ;
    }
    solve_direction(true, sigma * mm.mu);
    ax = az = 1.0;
    for (auto& b : blocks) {
      ax = std::min(ax, opt.step_fraction * max_step(b.X, b.dX, 1.0 / opt.step_fraction));
      az = std::min(az, opt.step_fraction * max_step(b.Z, b.dZ, 1.0 / opt.step_fraction));
    }
    if (ax < 1e-8 && az < 1e-8) {
      res.message = "step length collapsed";
      break;
    }
    for (int i = 0; i < m; ++i) y[i] += az * dy[i];
    for (auto& b : blocks) {
      b.X += ax * b.dX;
      b.Z += az * b.dZ;
    }
  }

  if (iter == opt.max_iterations) res.message = "iteration limit reached";
  // Re-evaluate at the incumbent in case the last step improved it.
  {
    Metrics fin;
    compute_metrics(fin);
    if (fin.merit() < best_merit) {
      best_merit = fin.merit();
      best_y = y;
      best_metrics = fin;
    }
  }

  res.values = best_y;
  res.objective = 0;
  for (int i = 0; i < m; ++i) res.objective += c[i] * best_y[i];
  res.primal_residual = best_metrics.pinf;
  res.dual_residual = best_metrics.dinf;
  res.gap = best_metrics.merit();
  res.iterations = iter;
  if (res.status != SolveStatus::infeasible) {
    if (best_merit <= 10.0 * opt.residual_tol)
      res.status = SolveStatus::optimal;
    else if (best_merit <= opt.accept_tol)
      res.status = SolveStatus::feasible;
    else if (best_merit < 1e-2)
      res.status = SolveStatus::inaccurate;
    else
      res.status = SolveStatus::failed;
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace lpvdda
