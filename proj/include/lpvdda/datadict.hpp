#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lpvdda/model.hpp"
#include "lpvdda/rng.hpp"
#include "lpvdda/types.hpp"

namespace lpvdda {

struct DictionaryMeta {
  std::string generator;
  std::uint64_t seed = 0;
  std::optional<int> n_x;
  int schema_version = 1;
};

/// One measured input-scheduling-output record {u_k, p_k, y_k}_{k=1..N}.
class DataDictionary {
 public:
  DataDictionary(Signal u, Signal p, Signal y, DictionaryMeta meta = {});

  int N() const { return static_cast<int>(u_.size()); }
  int nu() const { return static_cast<int>(u_.front().size()); }
  int np() const { return static_cast<int>(p_.front().size()); }
  int ny() const { return static_cast<int>(y_.front().size()); }

  const Signal& u() const { return u_; }
  const Signal& p() const { return p_; }
  const Signal& y() const { return y_; }
  const DictionaryMeta& meta() const { return meta_; }
  DictionaryMeta& meta() { return meta_; }

 private:
  Signal u_, p_, y_;
  DictionaryMeta meta_;
};

/// Depth-L block Hankel matrix of a sequence: block (i, j) = seq_{i+j-1},
/// shape (L*dim) x (N-L+1).
Matrix hankel(const Signal& seq, int L);

/// Elementwise Kronecker sequence {p_k (x) u_k}.
Signal kron_sequence(const Signal& p, const Signal& u);

/// Block-diagonal Kronecker operator: diag_{i=1..L}(p_i (x) I_n),
/// shape (L n_p n) x (L n).
Matrix blockdiag_kron(const Signal& p_traj, int n);

/// The four Hankel matrices of a dictionary at depth L.
struct HankelStack {
  Matrix Hu, Hy, Hup, Hyp;
  int L = 0;
  int nu = 0, ny = 0, np = 0;

  static HankelStack build(const DataDictionary& dict, int L);
  int cols() const { return static_cast<int>(Hu.cols()); }
};

/// Left-hand side of the data-driven representation for a target scheduling
/// trajectory: top reproduces (u, y) windows, bottom must annihilate g.
struct DdStack {
  Matrix top;     // [H_L(u); H_L(y)]
  Matrix bottom;  // [H_L(u^p) - Pbar^{nu} H_L(u); H_L(y^p) - Pbar^{ny} H_L(y)]
};

DdStack build_dd_stack(const HankelStack& H, const Signal& pbar);
DdStack build_dd_stack(const DataDictionary& dict, int L, const Signal& pbar);

/// Numerical rank of the projection of the row space onto the null space,
/// given orthonormal bases of each.
int projection_dimension(const Matrix& nullspace_basis, const Matrix& rowspace_basis,
                         double tol);

struct PeReport {
  bool pass = false;
  int required = 0;
  std::vector<int> achieved;  // one per sampled scheduling trajectory
  int min_achieved() const;
};

/// Persistency-of-excitation test: for each sampled scheduling trajectory,
/// the projection of the Hankel row space onto the null space of the
/// scheduling-consistency blocks must have dimension n_x + n_u L.
PeReport check_pe(const DataDictionary& dict, int L, int n_x,
                  const std::vector<Signal>& scheduling_samples, double tol = -1.0);

/// Maps a combination vector g to the length-L IO trajectory
/// [u; y] = [H_L(u); H_L(y)] g.
std::pair<Signal, Signal> io_from_g(const DataDictionary& dict, int L, const Vector& g);
std::pair<Signal, Signal> io_from_g(const HankelStack& H, const Vector& g);

DataDictionary read_dictionary(const std::filesystem::path& path);
void write_dictionary(const DataDictionary& dict, const std::filesystem::path& path);

/// Simulates a seeded record from the model: u ~ N(0, I), p uniform on the
/// model's box scheduling set, truncated to the rate bound when one is
/// declared. Starts from a zero initial condition.
DataDictionary generate_dictionary(const LpvIoModel& model, int N, std::uint64_t seed);

}  // namespace lpvdda
