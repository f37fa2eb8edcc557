#include "lpvdda/datadict.hpp"

#include <fstream>
#include <sstream>

#include "lpvdda/linalg.hpp"

namespace lpvdda {

DataDictionary::DataDictionary(Signal u, Signal p, Signal y, DictionaryMeta meta)
    : u_(std::move(u)), p_(std::move(p)), y_(std::move(y)), meta_(std::move(meta)) {
  if (u_.empty() || u_.size() != p_.size() || u_.size() != y_.size())
    throw std::invalid_argument("dictionary: u, p, y must have equal nonzero length");
  for (std::size_t k = 1; k < u_.size(); ++k)
    if (u_[k].size() != u_[0].size() || p_[k].size() != p_[0].size() ||
        y_[k].size() != y_[0].size())
      throw std::invalid_argument("dictionary: ragged sample dimensions");
}

Matrix hankel(const Signal& seq, int L) {
  const int N = static_cast<int>(seq.size());
  if (L < 1 || L > N) throw std::invalid_argument("hankel: L outside [1, N]");
  const int d = static_cast<int>(seq.front().size());
  const int cols = N - L + 1;
  Matrix H(L * d, cols);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < cols; ++j) H.block(i * d, j, d, 1) = seq[i + j];
  return H;
}

Signal kron_sequence(const Signal& p, const Signal& u) {
  if (p.size() != u.size()) throw std::invalid_argument("kron_sequence: length mismatch");
  Signal out;
  out.reserve(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& pk = p[k];
    const auto& uk = u[k];
    Vector v(pk.size() * uk.size());
    for (int i = 0; i < pk.size(); ++i) v.segment(i * uk.size(), uk.size()) = pk(i) * uk;
    out.push_back(std::move(v));
  }
  return out;
}

Matrix blockdiag_kron(const Signal& p_traj, int n) {
  if (p_traj.empty() || n < 1) throw std::invalid_argument("blockdiag_kron: bad arguments");
  const int L = static_cast<int>(p_traj.size());
  const int np = static_cast<int>(p_traj.front().size());
  Matrix P = Matrix::Zero(L * np * n, L * n);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < np; ++j)
      P.block(i * np * n + j * n, i * n, n, n) =
          p_traj[i](j) * Matrix::Identity(n, n);
  return P;
}

HankelStack HankelStack::build(const DataDictionary& dict, int L) {
  HankelStack H;
  H.L = L;
  H.nu = dict.nu();
  H.ny = dict.ny();
  H.np = dict.np();
  H.Hu = hankel(dict.u(), L);
  H.Hy = hankel(dict.y(), L);
  H.Hup = hankel(kron_sequence(dict.p(), dict.u()), L);
  H.Hyp = hankel(kron_sequence(dict.p(), dict.y()), L);
  return H;
}

DdStack build_dd_stack(const HankelStack& H, const Signal& pbar) {
  if (static_cast<int>(pbar.size()) != H.L)
    throw std::invalid_argument("build_dd_stack: pbar length must equal L");
  DdStack out;
  out.top.resize(H.Hu.rows() + H.Hy.rows(), H.Hu.cols());
  out.top << H.Hu, H.Hy;
  const Matrix Pu = blockdiag_kron(pbar, H.nu);
  const Matrix Py = blockdiag_kron(pbar, H.ny);
  out.bottom.resize(H.Hup.rows() + H.Hyp.rows(), H.Hu.cols());
  out.bottom << H.Hup - Pu * H.Hu, H.Hyp - Py * H.Hy;
  return out;
}

DdStack build_dd_stack(const DataDictionary& dict, int L, const Signal& pbar) {
  if (dict.N() <= L) throw std::invalid_argument("build_dd_stack: need N > L");
  return build_dd_stack(HankelStack::build(dict, L), pbar);
}

int projection_dimension(const Matrix& nullspace_basis, const Matrix& rowspace_basis,
                         double tol) {
  if (nullspace_basis.cols() == 0 || rowspace_basis.cols() == 0) return 0;
  const Matrix projected = nullspace_basis * (nullspace_basis.transpose() * rowspace_basis);
  return numerical_rank(projected, tol);
}

int PeReport::min_achieved() const {
  int m = std::numeric_limits<int>::max();
  for (int d : achieved) m = std::min(m, d);
  return achieved.empty() ? 0 : m;
}

PeReport check_pe(const DataDictionary& dict, int L, int n_x,
                  const std::vector<Signal>& scheduling_samples, double tol) {
  if (scheduling_samples.empty()) throw std::invalid_argument("check_pe: no scheduling samples");
  const HankelStack H = HankelStack::build(dict, L);
  double maxabs = std::max({H.Hu.cwiseAbs().maxCoeff(), H.Hy.cwiseAbs().maxCoeff()});
  if (maxabs == 0.0) throw std::invalid_argument("check_pe: all-zero dictionary");

  PeReport report;
  report.required = n_x + dict.nu() * L;
  const Matrix S = rowspace_basis((Matrix(H.Hu.rows() + H.Hy.rows(), H.Hu.cols()) << H.Hu, H.Hy).finished());
  for (const auto& pbar : scheduling_samples) {
    const DdStack dd = build_dd_stack(H, pbar);
    const Matrix Nb = lpvdda::nullspace_basis(dd.bottom);
    report.achieved.push_back(projection_dimension(Nb, S, tol));
  }
  report.pass = true;
  for (int d : report.achieved)
    if (d != report.required) report.pass = false;
  return report;
}

std::pair<Signal, Signal> io_from_g(const HankelStack& H, const Vector& g) {
  if (g.size() != H.cols()) throw std::invalid_argument("io_from_g: g length must be N-L+1");
  return {unstack(H.Hu * g, H.nu), unstack(H.Hy * g, H.ny)};
}

std::pair<Signal, Signal> io_from_g(const DataDictionary& dict, int L, const Vector& g) {
  return io_from_g(HankelStack::build(dict, L), g);
}

namespace {

void write_sample_row(std::ostream& os, const Vector& u, const Vector& p, const Vector& y) {
  auto put = [&](const Vector& v) {
    for (int i = 0; i < v.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v(i));
      os << buf << (i + 1 < v.size() ? " " : "");
    }
  };
  put(u);
  os << ' ';
  put(p);
  os << ' ';
  put(y);
  os << '\n';
}

}  // namespace

void write_dictionary(const DataDictionary& dict, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_dictionary: cannot open " + path.string());
  os << "lpvdda-dict v" << dict.meta().schema_version << "\n";
  os << "N " << dict.N() << "\n";
  os << "n_u " << dict.nu() << "\n";
  os << "n_p " << dict.np() << "\n";
  os << "n_y " << dict.ny() << "\n";
  os << "seed " << dict.meta().seed << "\n";
  if (dict.meta().n_x) os << "n_x " << *dict.meta().n_x << "\n";
  if (!dict.meta().generator.empty()) os << "generator " << dict.meta().generator << "\n";
  os << "data\n";
  for (int k = 0; k < dict.N(); ++k) write_sample_row(os, dict.u()[k], dict.p()[k], dict.y()[k]);
  if (!os) throw std::runtime_error("write_dictionary: write failed for " + path.string());
}

DataDictionary read_dictionary(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_dictionary: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("lpvdda-dict", 0) != 0)
    throw std::runtime_error("read_dictionary: missing schema marker");
  DictionaryMeta meta;
  {
    std::istringstream hs(line);
    std::string tag, ver;
    hs >> tag >> ver;
    if (ver.size() < 2 || ver[0] != 'v')
      throw std::runtime_error("read_dictionary: malformed version");
    meta.schema_version = std::stoi(ver.substr(1));
  }
  int N = -1, nu = -1, np = -1, ny = -1;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "data") break;
    if (key == "N")
      ls >> N;
    else if (key == "n_u")
      ls >> nu;
    else if (key == "n_p")
      ls >> np;
    else if (key == "n_y")
      ls >> ny;
    else if (key == "seed")
      ls >> meta.seed;
    else if (key == "n_x") {
      int v;
      ls >> v;
      meta.n_x = v;
    } else if (key == "generator") {
      std::string rest;
      std::getline(ls, rest);
      meta.generator = rest.empty() ? "" : rest.substr(rest.find_first_not_of(' '));
    } else if (!key.empty())
      throw std::runtime_error("read_dictionary: unknown header key '" + key + "'");
  }
  if (N < 1 || nu < 1 || np < 1 || ny < 1)
    throw std::runtime_error("read_dictionary: incomplete header");
  Signal u, p, y;
  for (int k = 0; k < N; ++k) {
    if (!std::getline(is, line))
      throw std::runtime_error("read_dictionary: expected " + std::to_string(N) + " rows");
    std::istringstream ls(line);
    Vector uk(nu), pk(np), yk(ny);
    for (int i = 0; i < nu; ++i)
      if (!(ls >> uk(i))) throw std::runtime_error("read_dictionary: short row");
    for (int i = 0; i < np; ++i)
      if (!(ls >> pk(i))) throw std::runtime_error("read_dictionary: short row");
    for (int i = 0; i < ny; ++i)
      if (!(ls >> yk(i))) throw std::runtime_error("read_dictionary: short row");
    double extra;
    if (ls >> extra) throw std::runtime_error("read_dictionary: row has extra columns");
    u.push_back(uk);
    p.push_back(pk);
    y.push_back(yk);
  }
  return DataDictionary(std::move(u), std::move(p), std::move(y), std::move(meta));
}

DataDictionary generate_dictionary(const LpvIoModel& model, int N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("generate_dictionary: N >= 1 required");
  const auto* sched = model.scheduling();
  if (!sched || !sched->as_box())
    throw std::invalid_argument("generate_dictionary: model needs a box scheduling set");
  const auto& box = *sched->as_box();

  Rng rng(seed);
  Signal u(N), p(N);
  for (int k = 0; k < N; ++k) {
    Vector uk(model.nu());
    for (int i = 0; i < model.nu(); ++i) uk(i) = rng.normal();
    u[k] = uk;
    Vector pk(model.np());
    for (int j = 0; j < model.np(); ++j) {
      double lo = box.lo(j), hi = box.hi(j);
      if (box.rate && k > 0) {
        lo = std::max(lo, p[k - 1](j) + box.rate->lo(j));
        hi = std::min(hi, p[k - 1](j) + box.rate->hi(j));
      }
      pk(j) = rng.uniform(lo, hi);
    }
    p[k] = pk;
  }
  Signal y = simulate(model, u, p, InitialCondition::zero(model));
  DictionaryMeta meta;
  meta.seed = seed;
  meta.n_x = model.nx();
  meta.generator = box.rate ? "simulate:u=normal(0,1);p=uniform(P|rate)"
                            : "simulate:u=normal(0,1);p=uniform(P)";
  return DataDictionary(std::move(u), std::move(p), std::move(y), std::move(meta));
}

}  // namespace lpvdda
