#pragma once

#include "lpvdda/datadict.hpp"
#include "lpvdda/model.hpp"

namespace lpvdda {

/// Euler-discretized unbalanced-disc plant
///   th_k + (Ts/tau - 2) th_{k-1} + (1 - Ts/tau) th_{k-2}
///        + Ts^2 (mgl/J) sin(th_{k-2}) = Ts^2 (Km/tau) u_{k-2}.
struct DiscParams {
  double mgl_over_J = 42.37;  // m g l / J
  double tau = 0.618;
  double Km = 15.3;
  double Ts = 0.01;
};

/// FIR scheduling-dependent tracking controller
///   u_k = sum_{i=0..n_k} k_i(p_{k-i}) e_{k-i},  k_i(p) = k[i][0] + k[i][1] p.
struct FirLpvController {
  std::vector<std::array<double, 2>> taps;
  int order() const { return static_cast<int>(taps.size()) - 1; }
};

/// Simulates the nonlinear closed loop (tracking error e = r - th, scheduling
/// p = sinc(th)) from rest and returns the (r, p, e) record as a dictionary
/// with u := r and y := e.
DataDictionary unbalanced_disc_closed_loop(const DiscParams& params,
                                           const FirLpvController& controller, const Signal& r);

/// The shifted-affine closed-loop model of the r -> e map obtained by
/// embedding sin(th) = p th with p = sinc(th). Order n_a = n_k + 2, n_b = 2.
LpvIoModel unbalanced_disc_embedding(const DiscParams& params, const FirLpvController& controller);

}  // namespace lpvdda
