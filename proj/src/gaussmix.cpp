#include "fovsplit/gaussmix.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fovsplit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kWeightPrune = 1e-8;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Cholesky-based log density; also the PD check used across this module.
double log_gaussian_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov) {
  if (x.size() != mean.size() || mean.size() != cov.rows() || cov.rows() != cov.cols())
    throw std::invalid_argument("gaussian_pdf: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("gaussian_pdf: covariance not positive definite");
  Eigen::VectorXd d = x - mean;
  Eigen::VectorXd y = llt.matrixL().solve(d);
  double logdet = 0.0;
  for (int i = 0; i < cov.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (y.squaredNorm() + logdet + cov.rows() * std::log(kTwoPi));
}

double log_det_spd(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("reduce: covariance not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < cov.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return logdet;
}

}  // namespace

double GaussianMixture::total_weight() const {
  double w = 0.0;
  for (const auto& c : components) w += c.weight;
  return w;
}

double GaussianMixture::pdf(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (const auto& c : components) v += c.weight * gaussian_pdf(x, c.mean, c.cov);
  return v;
}

void validate(const GaussianComponent& c) {
  if (!std::isfinite(c.weight) || c.weight < 0.0)
    throw std::invalid_argument("GaussianComponent: weight must be finite and >= 0");
  if (c.mean.size() == 0) throw std::invalid_argument("GaussianComponent: empty mean");
  if (!c.mean.allFinite() || !all_finite(c.cov))
    throw std::invalid_argument("GaussianComponent: non-finite entries");
  if (c.cov.rows() != c.mean.size() || c.cov.cols() != c.mean.size())
    throw std::invalid_argument("GaussianComponent: covariance shape mismatch");
  const double scale = std::max(1.0, c.cov.cwiseAbs().maxCoeff());
  if ((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("GaussianComponent: covariance not symmetric");
}

void validate(const GaussianMixture& gm) {
  if (gm.position_dim < 0 || gm.position_dim > gm.dim)
    throw std::invalid_argument("GaussianMixture: position_dim out of range");
  for (const auto& c : gm.components) {
    validate(c);
    if (c.dim() != gm.dim) throw std::invalid_argument("GaussianMixture: component dim mismatch");
  }
  if (gm.normalized && std::abs(gm.total_weight() - 1.0) > 1e-9)
    throw std::invalid_argument("GaussianMixture: flagged normalized but weights do not sum to 1");
}

double gaussian_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov) {
  return std::exp(log_gaussian_pdf(x, mean, cov));
}

double gaussian_product_integral(const Eigen::VectorXd& m1, const Eigen::MatrixXd& P1,
                                 const Eigen::VectorXd& m2, const Eigen::MatrixXd& P2) {
  return gaussian_pdf(m1, m2, P1 + P2);
}

EigenBasis eig_decompose(const Eigen::MatrixXd& cov) {
  if (cov.rows() == 0 || cov.rows() != cov.cols())
    throw std::invalid_argument("eig_decompose: matrix must be square and non-empty");
  if (!all_finite(cov)) throw std::invalid_argument("eig_decompose: non-finite entries");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eig_decompose: input not symmetric");

  Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_decompose: eigensolver failed");

  const int n = static_cast<int>(cov.rows());
  EigenBasis basis;
  basis.values.resize(n);
  basis.vectors.resize(n, n);
  // Eigen returns ascending order; store descending.
  for (int i = 0; i < n; ++i) {
    basis.values(i) = solver.eigenvalues()(n - 1 - i);
    basis.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  if (basis.values(n - 1) <= 0.0)
    throw std::invalid_argument("eig_decompose: input not positive definite");
  // Sign convention: largest-magnitude entry of each eigenvector positive,
  // first such index on magnitude ties.
  for (int j = 0; j < n; ++j) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double a = std::abs(basis.vectors(i, j));
      if (a > best + 1e-15 * std::max(1.0, best)) {
        best = a;
        arg = i;
      }
    }
    if (basis.vectors(arg, j) < 0.0) basis.vectors.col(j) = -basis.vectors.col(j);
  }
  return basis;
}

double l2_distance(const GaussianMixture& f, const GaussianMixture& g) {
  if (f.dim != g.dim) throw std::invalid_argument("l2_distance: dimension mismatch");
  if (f.empty() || g.empty()) throw std::invalid_argument("l2_distance: empty mixture");

  auto cross = [](const GaussianMixture& a, const GaussianMixture& b) {
    double s = 0.0;
    for (const auto& ca : a.components)
      for (const auto& cb : b.components)
        s += ca.weight * cb.weight * gaussian_product_integral(ca.mean, ca.cov, cb.mean, cb.cov);
    return s;
  };
  double v = cross(f, f) - 2.0 * cross(f, g) + cross(g, g);
  return std::max(v, 0.0);
}

GaussianMixture reduce(const GaussianMixture& gm, int max_components) {
  if (gm.empty()) throw std::invalid_argument("reduce: empty mixture");
  if (max_components < 1) throw std::invalid_argument("reduce: max_components must be >= 1");
  if (gm.size() <= max_components) return gm;

  // Prune negligible weights, rescaling to preserve the total weight.
  const double total = gm.total_weight();
  std::vector<GaussianComponent> comps;
  comps.reserve(gm.components.size());
  for (const auto& c : gm.components)
    if (c.weight >= kWeightPrune) comps.push_back(c);
  if (comps.empty()) {
    // Degenerate input, keep the single largest component.
    const GaussianComponent* best = &gm.components.front();
    for (const auto& c : gm.components)
      if (c.weight > best->weight) best = &c;
    comps.push_back(*best);
  }
  double kept = 0.0;
  for (const auto& c : comps) kept += c.weight;
  if (kept > 0.0)
    for (auto& c : comps) c.weight *= total / kept;

  const int L0 = static_cast<int>(comps.size());
  std::vector<double> logdet(L0);
  for (int i = 0; i < L0; ++i) logdet[i] = log_det_spd(comps[i].cov);
  std::vector<bool> alive(L0, true);
  int alive_count = L0;

  auto merged = [&](int i, int j, double* out_logdet) {
    const auto& a = comps[i];
    const auto& b = comps[j];
    double w = a.weight + b.weight;
    double wa = a.weight / w, wb = b.weight / w;
    Eigen::VectorXd m = wa * a.mean + wb * b.mean;
    Eigen::VectorXd da = a.mean - m, db = b.mean - m;
    Eigen::MatrixXd P = wa * (a.cov + da * da.transpose()) + wb * (b.cov + db * db.transpose());
    P = 0.5 * (P + P.transpose());
    if (out_logdet) *out_logdet = log_det_spd(P);
    GaussianComponent c;
    c.weight = w;
    c.mean = std::move(m);
    c.cov = std::move(P);
    return c;
  };

  auto cost = [&](int i, int j) {
    double ld;
    merged(i, j, &ld);
    return 0.5 * ((comps[i].weight + comps[j].weight) * ld - comps[i].weight * logdet[i] -
                  comps[j].weight * logdet[j]);
  };

  // Pairwise cost cache; only rows touched by a merge are recomputed.
  Eigen::MatrixXd costs = Eigen::MatrixXd::Constant(L0, L0, std::numeric_limits<double>::infinity());
  for (int i = 0; i < L0; ++i)
    for (int j = i + 1; j < L0; ++j) costs(i, j) = cost(i, j);

  while (alive_count > max_components) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < L0; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < L0; ++j) {
        if (!alive[j]) continue;
        if (costs(i, j) < best) {
          best = costs(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    double ld;
    GaussianComponent m = merged(bi, bj, &ld);
    comps[bi] = std::move(m);
    logdet[bi] = ld;
    alive[bj] = false;
    --alive_count;
    for (int k = 0; k < L0; ++k) {
      if (!alive[k] || k == bi) continue;
      int lo = std::min(k, bi), hi = std::max(k, bi);
      costs(lo, hi) = cost(lo, hi);
    }
  }

  GaussianMixture out;
  out.dim = gm.dim;
  out.position_dim = gm.position_dim;
  out.normalized = gm.normalized;
  for (int i = 0; i < L0; ++i)
    if (alive[i]) out.components.push_back(std::move(comps[i]));
  return out;
}

MixtureMoments mixture_moments(const GaussianMixture& gm) {
  if (gm.empty()) throw std::invalid_argument("mixture_moments: empty mixture");
  const double w = gm.total_weight();
  if (w <= 0.0) throw std::invalid_argument("mixture_moments: zero total weight");

  MixtureMoments mm;
  mm.mean = Eigen::VectorXd::Zero(gm.dim);
  for (const auto& c : gm.components) mm.mean += (c.weight / w) * c.mean;
  mm.cov = Eigen::MatrixXd::Zero(gm.dim, gm.dim);
  for (const auto& c : gm.components) {
    Eigen::VectorXd d = c.mean - mm.mean;
    mm.cov += (c.weight / w) * (c.cov + d * d.transpose());
  }
  mm.cov = 0.5 * (mm.cov + mm.cov.transpose());
  return mm;
}

GaussianComponent position_marginal(const GaussianComponent& c, int n_s) {
  if (n_s < 1 || n_s > c.dim())
    throw std::invalid_argument("position_marginal: n_s out of range");
  GaussianComponent out;
  out.weight = c.weight;
  out.mean = c.mean.head(n_s);
  out.cov = c.cov.topLeftCorner(n_s, n_s);
  return out;
}

Eigen::MatrixXd sample_mixture(const GaussianMixture& gm, int n, std::mt19937_64& rng) {
  if (gm.empty()) throw std::invalid_argument("sample_mixture: empty mixture");
  if (n < 0) throw std::invalid_argument("sample_mixture: negative sample count");
  std::vector<double> w(gm.size());
  for (int i = 0; i < gm.size(); ++i) w[i] = gm.components[i].weight;
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::normal_distribution<double> nrm(0.0, 1.0);

  std::vector<Eigen::MatrixXd> chol(gm.size());
  Eigen::MatrixXd out(gm.dim, n);
  for (int s = 0; s < n; ++s) {
    int i = pick(rng);
    if (chol[i].size() == 0) {
      Eigen::LLT<Eigen::MatrixXd> llt(gm.components[i].cov);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("sample_mixture: covariance not positive definite");
      chol[i] = llt.matrixL();
    }
    Eigen::VectorXd z(gm.dim);
    for (int d = 0; d < gm.dim; ++d) z(d) = nrm(rng);
    out.col(s) = gm.components[i].mean + chol[i] * z;
  }
  return out;
}

GaussianMixture position_marginal(const GaussianMixture& gm) {
  if (gm.position_dim < 1)
    throw std::invalid_argument("position_marginal: mixture has no position block");
  GaussianMixture out;
  out.dim = gm.position_dim;
  out.position_dim = gm.position_dim;
  out.normalized = gm.normalized;
  out.components.reserve(gm.components.size());
  for (const auto& c : gm.components) out.components.push_back(position_marginal(c, gm.position_dim));
  return out;
}

}  // namespace fovsplit
