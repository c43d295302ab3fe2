#include "dunkl/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "dunkl/errors.hpp"

namespace dunkl {

Eigen::MatrixXd hessian(const RootSystem& system, const Vec& z) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(z.size(), z.size());
  for (const auto& r : system.positive_roots()) {
    const double p = r.vec.dot(z);
    H += (r.k / (p * p)) * r.vec * r.vec.transpose();
  }
  return H;
}

std::string to_string(CtildeVariant variant) { return variant == CtildeVariant::Paper ? "paper" : "corrected"; }

CtildeVariant ctilde_variant_from_string(const std::string& name) {
  if (name == "paper") return CtildeVariant::Paper;
  if (name == "corrected") return CtildeVariant::Corrected;
  throw ConfigError("unknown C-tilde variant '" + name + "'");
}

namespace {

// Integrand values for every root at one Gaussian point, plus the weighted
// sum entering the sum rule.
struct CtildeIntegrand {
  const RootSystem& system;
  Vec inv_proj;   // 1 / (alpha.z)
  Vec sum_coef;   // |alpha|^2 k / (4 (alpha.z)^2)
  Eigen::MatrixXd roots;
  CtildeVariant variant;

  CtildeIntegrand(const RootSystem& sys, const Vec& z, CtildeVariant v)
      : system(sys),
        inv_proj(static_cast<Eigen::Index>(sys.size())),
        sum_coef(static_cast<Eigen::Index>(sys.size())),
        roots(static_cast<Eigen::Index>(sys.size()), sys.rank()),
        variant(v) {
    for (std::size_t a = 0; a < sys.size(); ++a) {
      const Root& r = sys.root(a);
      const double p = r.vec.dot(z);
      const auto i = static_cast<Eigen::Index>(a);
      roots.row(i) = r.vec.transpose();
      inv_proj[i] = 1.0 / p;
      sum_coef[i] = r.norm_sq * r.k / (4.0 * p * p);
    }
  }

  // Writes one value per root into out and returns the sum-rule combination.
  double operator()(const Vec& x, Vec& out) const {
    const Vec u = (roots * x).cwiseProduct(inv_proj);
    double A = 0.0;
    for (std::size_t a = 0; a < system.size(); ++a) {
      const double ua = u[static_cast<Eigen::Index>(a)];
      A += system.root(a).k * ua * ua * ua;
    }
    A /= 3.0;
    for (Eigen::Index a = 0; a < u.size(); ++a) {
      const double ua = u[a];
      if (variant == CtildeVariant::Paper) {
        const double b = 2.0 * ua - A;
        out[a] = ua * ua + 0.5 * b * b;
      } else {
        out[a] = 3.0 * ua * ua - 2.0 * ua * A;
      }
    }
    return sum_coef.dot(out);
  }
};

}  // namespace

CtildeTable ctilde(const RootSystem& system, const Vec& z, const Eigen::MatrixXd& H, CtildeVariant variant,
                   IntegrationMethod method, std::size_t n, std::uint64_t seed) {
  const int dim = system.rank();
  const Eigen::LLT<Eigen::MatrixXd> llt(H.inverse());
  if (llt.info() != Eigen::Success) throw QuadratureError("Hessian is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const CtildeIntegrand integrand(system, z, variant);
  const auto roots = static_cast<Eigen::Index>(system.size());

  CtildeTable table;
  table.variant = variant;
  table.method = method;
  table.values.assign(system.size(), 0.0);
  table.errors.assign(system.size(), 0.0);

  if (method == IntegrationMethod::GaussQuadrature) {
    if (dim > 3) throw QuadratureError("tensor Gauss-Hermite quadrature is limited to N <= 3");
    constexpr int kNodes = 20;
    const GaussHermiteRule rule = gauss_hermite(kNodes);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Vec acc = Vec::Zero(roots);
    double acc_sum = 0.0;
    Vec xi(dim);
    Vec vals(roots);
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= kNodes;
    for (std::size_t point = 0; point < total; ++point) {
      std::size_t rest = point;
      double w = 1.0;
      for (int d = 0; d < dim; ++d) {
        const int i = static_cast<int>(rest % kNodes);
        rest /= kNodes;
        xi[d] = std::sqrt(2.0) * rule.nodes[i];
        w *= rule.weights[i] / std::sqrt(M_PI);
      }
      const double s = integrand(L * xi, vals);
      acc += w * vals;
      acc_sum += w * s;
    }
    for (Eigen::Index a = 0; a < roots; ++a) table.values[static_cast<std::size_t>(a)] = acc[a];
    table.sum_rule = acc_sum;
    return table;
  }

  if (n < 2) throw QuadratureError("Monte Carlo needs at least two samples");
  // Chunked accumulation with one stream per chunk; merged in chunk order.
  constexpr std::size_t kChunk = 8192;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  struct Partial {
    Vec sum, sumsq;
    double s = 0.0, s2 = 0.0;
  };
  std::vector<Partial> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Partial p{Vec::Zero(roots), Vec::Zero(roots)};
    Philox rng(seed, c);
    Vec xi(dim);
    Vec vals(roots);
    Vec vals_neg(roots);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      for (int d = 0; d < dim; ++d) xi[d] = rng.normal();
      const Vec x = L * xi;
      // Antithetic pair (x, -x), averaged into one sample.
      const double s1 = integrand(x, vals);
      const double s2 = integrand(-x, vals_neg);
      const Vec v = 0.5 * (vals + vals_neg);
      const double s = 0.5 * (s1 + s2);
      p.sum += v;
      p.sumsq += v.cwiseProduct(v);
      p.s += s;
      p.s2 += s * s;
    }
    parts[c] = std::move(p);
  });
  Vec sum = Vec::Zero(roots);
  Vec sumsq = Vec::Zero(roots);
  double s = 0.0;
  double s2 = 0.0;
  for (const auto& p : parts) {
    sum += p.sum;
    sumsq += p.sumsq;
    s += p.s;
    s2 += p.s2;
  }
  const double dn = static_cast<double>(n);
  for (Eigen::Index a = 0; a < roots; ++a) {
    const double mean = sum[a] / dn;
    const double var = std::max(0.0, (sumsq[a] - dn * mean * mean) / (dn - 1.0));
    table.values[static_cast<std::size_t>(a)] = mean;
    table.errors[static_cast<std::size_t>(a)] = std::sqrt(var / dn);
  }
  table.sum_rule = s / dn;
  table.sum_rule_stderr = std::sqrt(std::max(0.0, (s2 - dn * table.sum_rule * table.sum_rule) / (dn - 1.0)) / dn);
  return table;
}

double sum_rule_residual(const RootSystem& system, const CtildeTable& table) {
  return std::abs(table.sum_rule - system.gamma() / 4.0);
}

std::vector<double> perturbation_weights(const RootSystem& system, const Vec& z, const CtildeTable& table) {
  if (table.values.size() != system.size()) throw MismatchError("one C-tilde value per root is required");
  std::vector<double> w;
  for (std::size_t a = 0; a < system.size(); ++a) {
    const Root& r = system.root(a);
    const double p = r.vec.dot(z);
    w.push_back(r.norm_sq * r.k * table.values[a] / (4.0 * p * p));
  }
  return w;
}

std::vector<FirstOrderGroup> first_order_exponents(const SpectrumResult& frozen, const std::vector<double>& weights,
                                                   const GroupTable& table) {
  if (static_cast<std::size_t>(frozen.values.size()) != table.order())
    throw MismatchError("frozen spectrum and group table differ in size");
  const Eigen::MatrixXd V = generator_matrix(table, weights);
  std::vector<FirstOrderGroup> out;
  for (const auto& g : frozen.groups) {
    const Eigen::MatrixXd phi =
        frozen.vectors.middleCols(static_cast<Eigen::Index>(g.first), static_cast<Eigen::Index>(g.multiplicity));
    const Eigen::MatrixXd proj = phi.transpose() * V * phi;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (proj + proj.transpose()));
    FirstOrderGroup group;
    group.r0 = g.value;
    group.multiplicity = g.multiplicity;
    for (Eigen::Index i = solver.eigenvalues().size() - 1; i >= 0; --i) group.r1.push_back(solver.eigenvalues()[i]);
    out.push_back(std::move(group));
  }
  return out;
}

double predicted_r1(const std::vector<FirstOrderGroup>& groups, double beta) {
  for (const auto& g : groups)
    if (g.r0 < -1e-9) return g.r0 + g.r1.front() / beta;
  throw MismatchError("frozen spectrum has no nonzero exponent");
}

PerturbationReport perturbation_report(Family family, int n, IntegrationMethod method, std::size_t samples,
                                       std::uint64_t seed) {
  // beta does not enter the frozen quantities; any admissible value works.
  const RootSystem system = build_root_system(family, n, 2.0);
  PerturbationReport rep;
  rep.family = family;
  rep.rank = n;
  rep.gamma = system.gamma();
  rep.peak = peak_vector(system);
  rep.H = hessian(system, rep.peak.z);
  rep.paper = ctilde(system, rep.peak.z, rep.H, CtildeVariant::Paper, method, samples, seed);
  rep.corrected = ctilde(system, rep.peak.z, rep.H, CtildeVariant::Corrected, method, samples, seed);
  rep.residual_paper = sum_rule_residual(system, rep.paper);
  rep.residual_corrected = sum_rule_residual(system, rep.corrected);

  const GroupTable table = GroupTable::enumerate(system);
  const MasterOperator frozen = build_master(frozen_rate_table(system, rep.peak), table);
  rep.groups = first_order_exponents(spectrum(frozen), perturbation_weights(system, rep.peak.z, rep.corrected), table);
  return rep;
}

std::vector<PredictionRow> predict_vs_measured(const PerturbationReport& report, const std::vector<double>& betas,
                                               std::size_t nsamples, std::uint64_t seed) {
  std::vector<PredictionRow> rows;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const RootSystem system = build_root_system(report.family, report.rank, betas[b]);
    const GroupTable table = GroupTable::enumerate(system);
    const RateTable rates = estimate_rates_origin(system, nsamples, derive_seed(seed, b));
    const MasterOperator op = build_master(rates, table);
    const SpectrumResult s = spectrum(op);

    PredictionRow row;
    row.beta = betas[b];
    row.r1_zeroth = predicted_r1(report.groups, INFINITY);
    row.r1_predicted = predicted_r1(report.groups, betas[b]);
    row.r1_measured = s.r1();
    // Delta method with d r / d lambda_alpha = phi^T S_alpha phi - 1.
    Eigen::Index i1 = 0;
    while (i1 < s.values.size() && s.values[i1] > -1e-9) ++i1;
    const Vec phi = s.vectors.col(std::min(i1, s.values.size() - 1));
    double var = 0.0;
    for (std::size_t a = 0; a < table.num_roots(); ++a) {
      const auto map = table.right_mult(a);
      double overlap = 0.0;
      for (Eigen::Index tau = 0; tau < phi.size(); ++tau) overlap += phi[tau] * phi[map[static_cast<std::size_t>(tau)]];
      const double d = overlap - 1.0;
      var += d * d * rates.entries[a].stderr_ * rates.entries[a].stderr_;
    }
    row.stderr_ = std::sqrt(var);
    rows.push_back(row);
  }
  return rows;
}

double extrapolate_r1(const std::vector<PredictionRow>& rows) {
  if (rows.size() < 2) throw InsufficientRangeError("extrapolation needs at least two beta values");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& r : rows) {
    mx += 1.0 / r.beta;
    my += r.r1_measured;
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& r : rows) {
    sxx += (1.0 / r.beta - mx) * (1.0 / r.beta - mx);
    sxy += (1.0 / r.beta - mx) * (r.r1_measured - my);
  }
  return my - (sxy / sxx) * mx;
}

nlohmann::json to_json(const PerturbationReport& report, const std::vector<PredictionRow>& predictions) {
  const RootSystem system = build_root_system(report.family, report.rank, 2.0);
  auto ctilde_json = [&](const CtildeTable& t) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t a = 0; a < t.values.size(); ++a) j[system.root(a).label()] = t.values[a];
    return j;
  };
  std::vector<std::vector<double>> H;
  for (Eigen::Index i = 0; i < report.H.rows(); ++i) {
    H.emplace_back();
    for (Eigen::Index j = 0; j < report.H.cols(); ++j) H.back().push_back(report.H(i, j));
  }
  nlohmann::json r0 = nlohmann::json::array();
  nlohmann::json r1 = nlohmann::json::array();
  for (const auto& g : report.groups) {
    r0.push_back({{"value", g.r0}, {"multiplicity", g.multiplicity}});
    r1.push_back(g.r1);
  }
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : predictions)
    preds.push_back({{"beta", p.beta},
                     {"r1_predicted", p.r1_predicted},
                     {"r1_measured", p.r1_measured},
                     {"stderr", p.stderr_},
                     {"r1_zeroth", p.r1_zeroth}});
  return {{"family", to_string(report.family)},
          {"N", report.rank},
          {"z", std::vector<double>(report.peak.z.data(), report.peak.z.data() + report.peak.z.size())},
          {"H", H},
          {"gamma", report.gamma},
          {"r_star", report.peak.r_star},
          {"ctilde", {{"paper", ctilde_json(report.paper)}, {"corrected", ctilde_json(report.corrected)}}},
          {"sum_rule_residuals", {{"paper", report.residual_paper}, {"corrected", report.residual_corrected}}},
          {"r0", r0},
          {"r1", r1},
          {"predictions", preds}};
}

}  // namespace dunkl
