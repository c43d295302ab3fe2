#include "dunkl/freezing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "dunkl/errors.hpp"

namespace dunkl {

namespace {

double objective(const RootSystem& system, const Vec& x) {
  double f = 0.5 * x.squaredNorm();
  for (const auto& r : system.positive_roots()) f -= r.k * std::log(r.vec.dot(x));
  return f;
}

Vec gradient(const RootSystem& system, const Vec& x) {
  Vec g = x;
  for (const auto& r : system.positive_roots()) g -= (r.k / r.vec.dot(x)) * r.vec;
  return g;
}

Eigen::MatrixXd objective_hessian(const RootSystem& system, const Vec& x) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(x.size(), x.size());
  for (const auto& r : system.positive_roots()) {
    const double p = r.vec.dot(x);
    H += (r.k / (p * p)) * r.vec * r.vec.transpose();
  }
  return H;
}

Vec initial_point(const RootSystem& system) {
  const int n = system.rank();
  Vec x(n);
  if (system.family() == Family::A) {
    const boost::math::normal gauss;
    for (int i = 0; i < n; ++i) x[i] = boost::math::quantile(gauss, (i + 0.5) / n);
  } else {
    for (int i = 0; i < n; ++i) x[i] = i + 1.0;
  }
  return x * (std::sqrt(system.gamma()) / x.norm());
}

}  // namespace

PeakVector peak_vector(const RootSystem& system) {
  constexpr int kMaxIterations = 200;
  const bool project = system.family() == Family::A;
  const int n = system.rank();
  Vec x = initial_point(system);
  double f = objective(system, x);
  PeakVector out;
  for (int it = 0; it <= kMaxIterations; ++it) {
    Vec g = gradient(system, x);
    if (project) g.array() -= g.mean();
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      out.iterations = it;
      break;
    }
    if (it == kMaxIterations) throw ConvergenceError("peak vector Newton iteration did not converge");
    Vec d = -objective_hessian(system, x).llt().solve(g);
    if (project) d.array() -= d.mean();
    if (gnorm < 1e-6) {
      Vec trial = x + d;
      Vec gt = gradient(system, trial);
      if (project) gt.array() -= gt.mean();
      if (!chamber_interior(system, trial) || gt.lpNorm<Eigen::Infinity>() >= gnorm) {
        out.iterations = it;
        break;
      }
      x = trial;
      f = objective(system, x);
      continue;
    }
    const double slope = g.dot(d);
    double step = 1.0;
    Vec trial(n);
    double f_trial = 0.0;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      trial = x + step * d;
      if (!chamber_interior(system, trial)) continue;
      f_trial = objective(system, trial);
      if (f_trial <= f + 1e-4 * step * slope || step * d.norm() < 1e-15) break;
    }
    if (!chamber_interior(system, trial)) throw ConvergenceError("line search left the chamber");
    if (f_trial >= f && step * d.lpNorm<Eigen::Infinity>() < 1e-15) {
      out.iterations = it;
      x = trial;
      break;
    }
    x = trial;
    f = f_trial;
  }
  if (project) x.array() -= x.mean();
  out.z = x;
  out.objective = objective(system, x);
  Vec fixed = Vec::Zero(n);
  for (const auto& r : system.positive_roots()) fixed += (r.k / r.vec.dot(x)) * r.vec;
  out.residual = (x - fixed).lpNorm<Eigen::Infinity>();
  out.r_star = INFINITY;
  for (const auto& r : system.positive_roots())
    out.r_star = std::min(out.r_star, r.vec.dot(x) / (std::sqrt(r.norm_sq) * std::sqrt(system.gamma())));
  return out;
}

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1 || n > 50) throw DimensionError("Hermite rules are supported for 1 <= N <= 50");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k - 1, k) = J(k, k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
  GaussHermiteRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = std::sqrt(M_PI) * solver.eigenvectors().row(0).transpose().array().square();
  // Exact symmetry of the rule.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Vec hermite_zeros(int n) { return gauss_hermite(n).nodes; }

std::pair<double, double> hermite_identity_residuals(const Vec& zeros) {
  double linear = 0.0;
  double cubic = 0.0;
  for (Eigen::Index i = 0; i < zeros.size(); ++i) {
    double s1 = 0.0;
    double s3 = 0.0;
    for (Eigen::Index j = 0; j < zeros.size(); ++j) {
      if (j == i) continue;
      const double d = zeros[i] - zeros[j];
      s1 += 1.0 / d;
      s3 += 2.0 / (d * d * d);
    }
    linear = std::max(linear, std::abs(zeros[i] - s1));
    cubic = std::max(cubic, std::abs(zeros[i] - s3));
  }
  return {linear, cubic};
}

std::vector<double> frozen_rates(const RootSystem& system, const Vec& z) {
  std::vector<double> out;
  for (const auto& r : system.positive_roots()) {
    const double p = r.vec.dot(z);
    out.push_back(r.norm_sq * r.k / (4.0 * p * p));
  }
  return out;
}

RateTable frozen_rate_table(const RootSystem& system, const PeakVector& peak) {
  RateTable table = make_rate_table(system, frozen_rates(system, peak.z), "frozen");
  if (system.multiplicities().all_one(system.family()))
    table.total_closed_form = static_cast<double>(system.size()) / 4.0;
  return table;
}

namespace {

std::vector<std::vector<int>> permutation_tuples(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::size_t chain_index(const std::vector<int>& digits, int n) {
  std::size_t idx = 0;
  for (int d : digits) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(d);
  return idx;
}

// Frozen PF operator on permutation tuples in lexicographic order.
Eigen::MatrixXd pf_matrix(int n, const Vec& z) {
  const auto tuples = permutation_tuples(n);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < tuples.size(); ++i) index.emplace(tuples[i], i);
  const auto dim = static_cast<Eigen::Index>(tuples.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        auto swapped = tuples[t];
        std::swap(swapped[i], swapped[j]);
        const double gap = z[j] - z[i];
        M(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(index.at(swapped))) += 0.5 / (gap * gap);
      }
    }
  }
  M.diagonal().array() -= n * (n - 1) / 8.0;
  return M;
}

double max_row_sum(const SparseC& A) {
  Vec rows = Vec::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseC::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

struct Chain {
  int n = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> stride;  // weight of site m in the index

  explicit Chain(int sites) : n(sites), dim(1), stride(static_cast<std::size_t>(sites)) {
    for (int m = sites - 1; m >= 0; --m) {
      stride[static_cast<std::size_t>(m)] = dim;
      dim *= static_cast<std::size_t>(sites);
    }
  }

  int digit(std::size_t idx, int m) const {
    return static_cast<int>((idx / stride[static_cast<std::size_t>(m)]) % static_cast<std::size_t>(n));
  }

  SparseC one_site(int m, const CMatrix& A) const {
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      const int d = digit(idx, m);
      for (int r = 0; r < n; ++r) {
        const auto v = A(r, d);
        if (v == 0.0) continue;
        const std::size_t target = idx + static_cast<std::size_t>(r) * stride[m] - static_cast<std::size_t>(d) * stride[m];
        trips.emplace_back(static_cast<int>(target), static_cast<int>(idx), v);
      }
    }
    SparseC out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  }

  // B acts on the pair (site m, site q) with local index d_m * N + d_q.
  SparseC two_site(int m, int q, const CMatrix& B) const {
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      const int dm = digit(idx, m);
      const int dq = digit(idx, q);
      const int col = dm * n + dq;
      const std::size_t base = idx - static_cast<std::size_t>(dm) * stride[m] - static_cast<std::size_t>(dq) * stride[q];
      for (int r = 0; r < n * n; ++r) {
        const auto v = B(r, col);
        if (std::abs(v) < 1e-300) continue;
        const std::size_t target =
            base + static_cast<std::size_t>(r / n) * stride[m] + static_cast<std::size_t>(r % n) * stride[q];
        trips.emplace_back(static_cast<int>(target), static_cast<int>(idx), v);
      }
    }
    SparseC out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  }
};

CMatrix kron(const CMatrix& A, const CMatrix& B) {
  CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

CMatrix swap_matrix(int n) {
  CMatrix P = CMatrix::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) P(b * n + a, a * n + b) = 1.0;
  return P;
}

// Operators of the ladder construction on the N^N chain.
struct LadderOperators {
  Chain chain;
  Vec z;
  std::vector<SuGenerator> gens;
  std::vector<std::complex<double>> f;
  SparseC M;
  std::vector<SparseC> K;
  std::vector<SparseC> L;

  explicit LadderOperators(int n) : chain(n), z(hermite_zeros(n)), gens(su_generators(n)) {
    f = structure_constants(gens);
    const std::size_t g = gens.size();
    const auto dim = static_cast<Eigen::Index>(chain.dim);
    M = SparseC(dim, dim);
    const CMatrix P = swap_matrix(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double gap = z[j] - z[i];
        M += chain.two_site(i, j, P) * std::complex<double>(0.5 / (gap * gap), 0.0);
      }
    for (std::size_t a = 0; a < g; ++a) {
      SparseC k(dim, dim);
      for (int m = 0; m < n; ++m) k += chain.one_site(m, gens[a].matrix) * std::complex<double>(z[m], 0.0);
      K.push_back(k);

      CMatrix T = CMatrix::Zero(n * n, n * n);
      for (std::size_t b = 0; b < g; ++b)
        for (std::size_t c = 0; c < g; ++c) {
          const auto coeff = f[(a * g + b) * g + c];
          if (std::abs(coeff) > 1e-15) T += coeff * kron(gens[b].matrix, gens[c].matrix);
        }
      SparseC l(dim, dim);
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
          if (m == q) continue;
          l += chain.two_site(m, q, T) * std::complex<double>(1.0 / (z[m] - z[q]), 0.0);
        }
      L.push_back(l);
    }
  }
};

void check_chain_size(int n) {
  if (n < 2 || n > 4) throw SizeError("chain verifications support N in {2, 3, 4}");
}

}  // namespace

PFSpectrumReport pf_spectrum(int n) {
  if (n < 2) throw DimensionError("PF chains need N >= 2");
  if (n > 7) throw SizeError("PF spectra are limited to N <= 7");
  PFSpectrumReport rep;
  rep.n = n;
  rep.z = hermite_zeros(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double gap = rep.z[j] - rep.z[i];
      rep.rates.push_back(0.5 / (gap * gap));
    }
  const Eigen::MatrixXd M = pf_matrix(n, rep.z);
  rep.spectrum = spectrum(M);
  for (const auto& g : rep.spectrum.groups)
    if (std::abs(g.value + 0.5) < 1e-8) rep.half_multiplicity = g.multiplicity;
  rep.min_eigenvalue = rep.spectrum.values[rep.spectrum.values.size() - 1];
  const double centre = -n * (n - 1) / 8.0;
  const Eigen::Index d = rep.spectrum.values.size();
  for (Eigen::Index i = 0; i < d; ++i)
    rep.symmetry_deviation =
        std::max(rep.symmetry_deviation, std::abs(rep.spectrum.values[i] + rep.spectrum.values[d - 1 - i] - 2.0 * centre));
  return rep;
}

std::vector<SuGenerator> su_generators(int n) {
  if (n < 2 || n > 8) throw DimensionError("su(N) generators are provided for 2 <= N <= 8");
  const std::complex<double> I(0.0, 1.0);
  std::vector<SuGenerator> out;
  for (int j = 1; j <= n; ++j) {
    for (int l = 1; l <= n; ++l) {
      if (j == n && l == n) continue;
      CMatrix A = CMatrix::Zero(n, n);
      if (j < l) {
        A(j - 1, l - 1) = 0.5;
        A(l - 1, j - 1) = 0.5;
      } else if (l < j) {
        A(l - 1, j - 1) = 0.5 * I;
        A(j - 1, l - 1) = -0.5 * I;
      } else {
        const double c = 1.0 / std::sqrt(2.0 * j * (j + 1));
        for (int m = 0; m < j; ++m) A(m, m) = c;
        A(j, j) = -j * c;
      }
      out.push_back({j, l, A});
    }
  }
  return out;
}

std::vector<std::complex<double>> structure_constants(const std::vector<SuGenerator>& gens) {
  const std::size_t g = gens.size();
  std::vector<std::complex<double>> f(g * g * g);
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b) {
      const CMatrix comm = gens[a].matrix * gens[b].matrix - gens[b].matrix * gens[a].matrix;
      for (std::size_t c = 0; c < g; ++c) f[(a * g + b) * g + c] = 2.0 * (comm * gens[c].matrix).trace();
    }
  return f;
}

double verify_exchange_identity(int n) {
  if (n > 8) throw SizeError("two-site checks are limited to N <= 8");
  const auto gens = su_generators(n);
  CMatrix rhs = CMatrix::Identity(n * n, n * n) / static_cast<double>(n);
  for (const auto& g : gens) rhs += 2.0 * kron(g.matrix, g.matrix);
  return (swap_matrix(n) - rhs).cwiseAbs().maxCoeff();
}

LadderReport verify_ladder_commutators(int n) {
  check_chain_size(n);
  const LadderOperators ops(n);
  LadderReport rep;
  const std::size_t g = ops.gens.size();
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b) {
      const CMatrix comm = ops.gens[a].matrix * ops.gens[b].matrix - ops.gens[b].matrix * ops.gens[a].matrix;
      CMatrix rebuilt = CMatrix::Zero(n, n);
      for (std::size_t c = 0; c < g; ++c) {
        rebuilt += ops.f[(a * g + b) * g + c] * ops.gens[c].matrix;
        rep.structure_antisymmetry =
            std::max({rep.structure_antisymmetry, std::abs(ops.f[(a * g + b) * g + c] + ops.f[(b * g + a) * g + c]),
                      std::abs(ops.f[(a * g + b) * g + c] + ops.f[(a * g + c) * g + b])});
      }
      rep.structure_antisymmetry = std::max(rep.structure_antisymmetry, (comm - rebuilt).cwiseAbs().maxCoeff());
    }

  for (std::size_t a = 0; a < g; ++a) {
    const SparseC cK = SparseC(ops.M * ops.K[a]) - SparseC(ops.K[a] * ops.M) - 0.5 * ops.L[a];
    const SparseC cL = SparseC(ops.M * ops.L[a]) - SparseC(ops.L[a] * ops.M) - 0.5 * ops.K[a];
    rep.commutator_K = std::max(rep.commutator_K, max_row_sum(cK));
    rep.commutator_L = std::max(rep.commutator_L, max_row_sum(cL));
  }

  // Eigenvectors of M restricted to permutation states, embedded in the chain.
  const auto tuples = permutation_tuples(n);
  const Eigen::MatrixXd pf = pf_matrix(n, ops.z);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(pf);
  const double shift = n * (n - 1) / 8.0;
  for (Eigen::Index e = 0; e < solver.eigenvalues().size(); ++e) {
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ops.chain.dim));
    for (std::size_t t = 0; t < tuples.size(); ++t)
      phi[static_cast<Eigen::Index>(chain_index(tuples[t], n))] = solver.eigenvectors()(static_cast<Eigen::Index>(t), e);
    const double r = solver.eigenvalues()[e] + shift;
    for (std::size_t a = 0; a < g; ++a) {
      for (int sgn : {1, -1}) {
        const Eigen::VectorXcd v = ops.K[a] * phi + static_cast<double>(sgn) * (ops.L[a] * phi);
        const double norm = v.norm();
        if (norm < 1e-10) continue;
        const Eigen::VectorXcd res = ops.M * v - (r + 0.5 * sgn) * v;
        rep.shift_residual = std::max(rep.shift_residual, res.norm() / norm);
      }
    }
  }
  return rep;
}

SubspaceReport verify_ladder_subspace(int n) {
  check_chain_size(n);
  const LadderOperators ops(n);
  const auto tuples = permutation_tuples(n);
  std::vector<bool> in_subspace(ops.chain.dim, false);
  std::vector<std::size_t> perm_index;
  for (const auto& t : tuples) {
    perm_index.push_back(chain_index(t, n));
    in_subspace[perm_index.back()] = true;
  }
  const Eigen::MatrixXd pf = pf_matrix(n, ops.z);

  SubspaceReport rep;
  rep.verdicts_ok = true;
  for (std::size_t a = 0; a < ops.gens.size(); ++a) {
    SubspaceEntry entry;
    entry.j = ops.gens[a].j;
    entry.l = ops.gens[a].l;
    for (int sgn : {1, -1}) {
      const SparseC ladder = ops.K[a] + static_cast<double>(sgn) * ops.L[a];
      for (std::size_t p : perm_index) {
        double inside = 0.0;
        double outside = 0.0;
        for (SparseC::InnerIterator it(ladder, static_cast<Eigen::Index>(p)); it; ++it) {
          const double w = std::norm(it.value());
          (in_subspace[static_cast<std::size_t>(it.row())] ? inside : outside) += w;
        }
        const double total = inside + outside;
        if (total < 1e-24) continue;
        entry.leak = std::max(entry.leak, std::sqrt(outside / total));
      }
    }
    entry.stays = entry.leak <= 1e-10;
    const bool expected = entry.j == entry.l;
    if (expected ? !entry.stays : entry.leak <= 1e-3) rep.verdicts_ok = false;

    if (entry.j == entry.l) {
      // (K - L) on the uniform permutation vector, read back on S_N.
      Eigen::VectorXcd u = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ops.chain.dim));
      for (std::size_t p : perm_index) u[static_cast<Eigen::Index>(p)] = 1.0 / std::sqrt(static_cast<double>(tuples.size()));
      const Eigen::VectorXcd v = ops.K[a] * u - ops.L[a] * u;
      Eigen::VectorXcd back(static_cast<Eigen::Index>(tuples.size()));
      for (std::size_t t = 0; t < tuples.size(); ++t) back[static_cast<Eigen::Index>(t)] = v[static_cast<Eigen::Index>(perm_index[t])];
      const double norm = back.norm();
      if (norm > 1e-10 && entry.stays) {
        const double res = (pf.cast<std::complex<double>>() * back + 0.5 * back).norm() / norm;
        rep.lowering_residual = std::max(rep.lowering_residual, res);
        if (res <= 1e-9) ++rep.lowering_count;
      }
    }
    rep.entries.push_back(entry);
  }
  return rep;
}

nlohmann::json to_json(const PFSpectrumReport& report) {
  std::vector<double> values(report.spectrum.values.data(), report.spectrum.values.data() + report.spectrum.values.size());
  return {{"N", report.n},
          {"eigenvalues", values},
          {"half_multiplicity", report.half_multiplicity},
          {"min_eigenvalue", report.min_eigenvalue},
          {"symmetry_deviation", report.symmetry_deviation}};
}

nlohmann::json to_json(const SubspaceReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"j", e.j}, {"l", e.l}, {"leak", e.leak}, {"stays", e.stays}});
  return {{"entries", entries},
          {"lowering_count", report.lowering_count},
          {"lowering_residual", report.lowering_residual},
          {"verdicts_ok", report.verdicts_ok}};
}

}  // namespace dunkl
