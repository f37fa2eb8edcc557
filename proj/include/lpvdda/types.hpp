#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lpvdda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A vector-valued discrete-time signal; element k is the sample at time k+1.
using Signal = std::vector<Vector>;

inline Vector scalar(double v) {
  Vector x(1);
  x(0) = v;
  return x;
}

inline Signal scalar_signal(const std::vector<double>& vals) {
  Signal s;
  s.reserve(vals.size());
  for (double v : vals) s.push_back(scalar(v));
  return s;
}

/// Stacks a signal into one column vector [w_1; w_2; ...; w_T].
inline Vector stack(const Signal& w) {
  if (w.empty()) return Vector(0);
  const Eigen::Index d = w.front().size();
  Vector out(static_cast<Eigen::Index>(w.size()) * d);
  for (std::size_t k = 0; k < w.size(); ++k) out.segment(static_cast<Eigen::Index>(k) * d, d) = w[k];
  return out;
}

/// Splits a stacked column vector back into T samples of dimension d.
inline Signal unstack(const Vector& v, int d) {
  Signal out;
  const int T = static_cast<int>(v.size()) / d;
  out.reserve(T);
  for (int k = 0; k < T; ++k) out.push_back(v.segment(k * d, d));
  return out;
}

}  // namespace lpvdda
