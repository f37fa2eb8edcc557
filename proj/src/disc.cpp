#include "lpvdda/disc.hpp"

#include <cmath>

namespace lpvdda {

DataDictionary unbalanced_disc_closed_loop(const DiscParams& params,
                                           const FirLpvController& controller, const Signal& r) {
  if (params.Ts <= 0.0) throw std::invalid_argument("unbalanced_disc: Ts must be positive");
  if (controller.taps.empty()) throw std::invalid_argument("unbalanced_disc: empty controller");
  const int T = static_cast<int>(r.size());
  const int nk = controller.order();
  const double c1 = params.Ts / params.tau - 2.0;
  const double c2 = 1.0 - params.Ts / params.tau;
  const double cg = params.Ts * params.Ts * params.mgl_over_J;
  const double cu = params.Ts * params.Ts * params.Km / params.tau;

  std::vector<double> th(T), e(T), u(T), psig(T);
  auto th_at = [&](int j) { return j >= 0 ? th[j] : 0.0; };
  auto u_at = [&](int j) { return j >= 0 ? u[j] : 0.0; };
  auto e_at = [&](int j) { return j >= 0 ? e[j] : 0.0; };
  auto p_at = [&](int j) { return j >= 0 ? psig[j] : 1.0; };  // sinc(0) at rest

  for (int k = 0; k < T; ++k) {
    th[k] = -c1 * th_at(k - 1) - c2 * th_at(k - 2) - cg * std::sin(th_at(k - 2)) +
            cu * u_at(k - 2);
    psig[k] = sinc(th[k]);
    e[k] = r[k](0) - th[k];
    if (!std::isfinite(th[k])) throw std::runtime_error("unbalanced_disc: trajectory diverged");
    double uk = 0.0;
    for (int i = 0; i <= nk; ++i)
      uk += (controller.taps[i][0] + controller.taps[i][1] * p_at(k - i)) * e_at(k - i);
    u[k] = uk;
  }

  Signal us(T), ps(T), ys(T);
  for (int k = 0; k < T; ++k) {
    us[k] = r[k];
    ps[k] = scalar(psig[k]);
    ys[k] = scalar(e[k]);
  }
  DictionaryMeta meta;
  meta.generator = "unbalanced-disc-closed-loop";
  meta.n_x = nk + 2;
  return DataDictionary(std::move(us), std::move(ps), std::move(ys), std::move(meta));
}

LpvIoModel unbalanced_disc_embedding(const DiscParams& params,
                                     const FirLpvController& controller) {
  const int nk = controller.order();
  const int na = nk + 2;
  const double c1 = params.Ts / params.tau - 2.0;
  const double c2 = 1.0 - params.Ts / params.tau;
  const double cg = params.Ts * params.Ts * params.mgl_over_J;
  const double cu = params.Ts * params.Ts * params.Km / params.tau;

  auto M = [](double v) { return Matrix::Constant(1, 1, v); };
  std::vector<std::vector<Matrix>> a(na, std::vector<Matrix>{M(0.0), M(0.0)});
  a[0] = {M(c1), M(0.0)};
  a[1] = {M(c2 + cu * controller.taps[0][0]), M(cg + cu * controller.taps[0][1])};
  for (int i = 1; i <= nk; ++i)
    a[i + 1] = {M(cu * controller.taps[i][0]), M(cu * controller.taps[i][1])};

  std::vector<std::vector<Matrix>> b = {
      {M(1.0), M(0.0)}, {M(c1), M(0.0)}, {M(c2), M(cg)}};

  // sinc ranges over (-0.2173, 1]; the box is padded slightly below.
  return LpvIoModel(1, 1, 1, std::move(a), std::move(b), na,
                    SchedulingSet::box(-0.22, 1.0));
}

}  // namespace lpvdda
