#include "fovsplit/cardinality.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace fovsplit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void clamp_pmf(Eigen::VectorXd& p) {
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) < 0.0) {
      if (p(i) < -1e-9) throw std::runtime_error("cardinality: negative probability");
      p(i) = 0.0;
    } else if (p(i) > 1.0) {
      if (p(i) > 1.0 + 1e-9) throw std::runtime_error("cardinality: probability above 1");
      p(i) = 1.0;
    }
  }
}

// Poisson-binomial over heterogeneous success probabilities q, evaluated with
// a DFT over the (M+1)-th roots of unity.
Eigen::VectorXd poisson_binomial_dft(const Eigen::VectorXd& q) {
  const int M = static_cast<int>(q.size());
  const int N = M + 1;
  Eigen::VectorXd out(N);
  std::vector<std::complex<double>> prod(N);
  for (int m = 0; m < N; ++m) {
    std::complex<double> w = std::polar(1.0, kTwoPi * m / N);
    std::complex<double> p(1.0, 0.0);
    for (int k = 0; k < M; ++k) p *= (1.0 - q(k)) + q(k) * w;
    prod[m] = p;
  }
  for (int n = 0; n < N; ++n) {
    std::complex<double> acc(0.0, 0.0);
    for (int m = 0; m < N; ++m) acc += std::polar(1.0, -kTwoPi * m * n / N) * prod[m];
    acc /= static_cast<double>(N);
    if (std::abs(acc.imag()) > 1e-9)
      throw std::runtime_error("poisson_binomial_dft: non-negligible imaginary residue");
    out(n) = acc.real();
  }
  clamp_pmf(out);
  return out;
}

double component_inclusion(const GaussianMixture& density, const Region& S,
                           const InclusionConfig& cfg, double* std_error) {
  if (std_error) *std_error = 0.0;
  const double total = density.total_weight();
  if (total <= 0.0) throw std::invalid_argument("inclusion_probability: zero total weight");
  if (cfg.method == InclusionMethod::kSplit) {
    SplitResult refined = split_for_fov(density, cfg.split, S);
    Partition parts = partition(refined.gm, S);
    return parts.inside.total_weight() / total;
  }
  if (cfg.mc_samples < 1)
    throw std::invalid_argument("inclusion_probability: mc_samples must be >= 1");
  std::mt19937_64 rng(cfg.mc_seed);
  Eigen::MatrixXd samples = sample_mixture(density, cfg.mc_samples, rng);
  const int n_s = S.dim();
  int hits = 0;
  for (int i = 0; i < samples.cols(); ++i)
    if (contains(S, samples.col(i).head(n_s))) ++hits;
  double p = static_cast<double>(hits) / cfg.mc_samples;
  if (std_error) *std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / cfg.mc_samples);
  return p;
}

}  // namespace

double CardinalityPmf::mean() const {
  double m = 0.0;
  for (int n = 0; n < probs.size(); ++n) m += n * probs(n);
  return m;
}

double CardinalityPmf::variance() const {
  double m = mean();
  double m2 = 0.0;
  for (int n = 0; n < probs.size(); ++n) m2 += static_cast<double>(n) * n * probs(n);
  return std::max(m2 - m * m, 0.0);
}

double void_probability(const CardinalityPmf& pmf) {
  if (pmf.probs.size() == 0) throw std::invalid_argument("void_probability: empty pmf");
  return pmf.probs(0);
}

void validate(const PoissonIntensity& d) {
  validate(d.phd);
  if (d.phd.empty()) throw std::invalid_argument("PoissonIntensity: empty intensity");
}

void validate(const MbComponents& mb) {
  if (mb.r.size() != mb.densities.size())
    throw std::invalid_argument("MbComponents: r/densities size mismatch");
  for (double ri : mb.r) {
    if (!(ri >= 0.0) || !(ri < 1.0))
      throw std::invalid_argument("MbComponents: existence probabilities must lie in [0, 1)");
  }
  for (const auto& p : mb.densities) {
    validate(p);
    if (p.empty()) throw std::invalid_argument("MbComponents: empty spatial density");
  }
}

void validate(const GlmbParams& glmb) {
  double total = 0.0;
  for (const auto& h : glmb.hypotheses) {
    if (!(h.weight >= 0.0)) throw std::invalid_argument("GlmbParams: negative hypothesis weight");
    total += h.weight;
    if (h.labels.size() != h.densities.size())
      throw std::invalid_argument("GlmbParams: labels/densities size mismatch");
    for (size_t i = 0; i < h.labels.size(); ++i)
      for (size_t j = i + 1; j < h.labels.size(); ++j)
        if (h.labels[i] == h.labels[j])
          throw std::invalid_argument("GlmbParams: duplicate label within hypothesis");
    for (const auto& p : h.densities) validate(p);
  }
  if (!glmb.hypotheses.empty() && std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("GlmbParams: hypothesis weights must sum to 1");
}

InclusionEstimate inclusion_probability(const GaussianMixture& density, const Region& S,
                                        const InclusionConfig& cfg) {
  InclusionEstimate est;
  est.value = component_inclusion(density, S, cfg, &est.std_error);
  return est;
}

CardinalityPmf conditional_fov_pmf(const std::vector<Eigen::VectorXd>& points, const Region& S) {
  int count = 0;
  for (const auto& x : points)
    if (contains(S, x)) ++count;
  CardinalityPmf pmf;
  pmf.probs = Eigen::VectorXd::Zero(static_cast<int>(points.size()) + 1);
  pmf.probs(count) = 1.0;
  return pmf;
}

CardinalityPmf conditional_fov_pmf(const std::vector<Eigen::VectorXd>& points, const Region& S,
                                   double p_d) {
  const int N = static_cast<int>(points.size());
  if (N > 20) throw std::invalid_argument("conditional_fov_pmf: more than 20 points");
  if (!(p_d >= 0.0 && p_d <= 1.0))
    throw std::invalid_argument("conditional_fov_pmf: p_d must lie in [0, 1]");
  Eigen::VectorXd q(N);
  for (int i = 0; i < N; ++i) q(i) = contains(S, points[i]) ? p_d : 0.0;

  CardinalityPmf pmf;
  pmf.probs = Eigen::VectorXd::Zero(N + 1);
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    double p = 1.0;
    int n = 0;
    for (int i = 0; i < N; ++i) {
      if (mask & (1u << i)) {
        p *= q(i);
        ++n;
      } else {
        p *= 1.0 - q(i);
      }
    }
    pmf.probs(n) += p;
  }
  clamp_pmf(pmf.probs);
  return pmf;
}

CardinalityPmf poisson_fov_pmf(const PoissonIntensity& intensity, const Region& S,
                               const InclusionConfig& cfg, double eps_tail) {
  validate(intensity);
  if (!(eps_tail > 0.0) || eps_tail >= 1.0)
    throw std::invalid_argument("poisson_fov_pmf: eps_tail must lie in (0, 1)");
  const double n_global = intensity.n_global();

  GaussianMixture normalized = intensity.phd;
  const double inside = component_inclusion(normalized, S, cfg, nullptr) * n_global;
  const double outside = n_global - inside;
  if (outside > 600.0)
    throw std::invalid_argument("poisson_fov_pmf: intensity mass too large for linear-space sum");

  // Inner sum over the count outside S, truncated once its Poisson tail
  // drops below eps_tail / 2.
  double inner = 0.0;
  double term = 1.0;  // outside^j / j!
  double cdf_scale = std::exp(-outside);
  double cum = 0.0;
  for (int j = 0; j <= 100000; ++j) {
    inner += term;
    cum += term * cdf_scale;
    if (cum >= 1.0 - 0.5 * eps_tail && j >= static_cast<int>(outside)) break;
    term *= outside / (j + 1);
  }

  // Outer sum over the count inside S, same truncation budget.
  std::vector<double> probs;
  double log_inner = std::log(inner);
  double cum_out = 0.0;
  for (int n = 0; n <= 100000; ++n) {
    double logp = -n_global + (n > 0 ? n * std::log(inside) : 0.0) - std::lgamma(n + 1.0) + log_inner;
    double p = (inside == 0.0 && n > 0) ? 0.0 : std::exp(logp);
    probs.push_back(p);
    cum_out += p;
    if (cum_out >= 1.0 - 0.5 * eps_tail && n >= static_cast<int>(inside)) break;
  }

  CardinalityPmf pmf;
  pmf.probs = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<int>(probs.size()));
  clamp_pmf(pmf.probs);
  return pmf;
}

CardinalityPmf iidc_fov_pmf(const Eigen::VectorXd& rho, const GaussianMixture& spatial,
                            const Region& S, const InclusionConfig& cfg) {
  if (rho.size() == 0) throw std::invalid_argument("iidc_fov_pmf: empty cardinality");
  if ((rho.array() < 0.0).any())
    throw std::invalid_argument("iidc_fov_pmf: negative cardinality probability");
  const double q = component_inclusion(spatial, S, cfg, nullptr);

  const int M = static_cast<int>(rho.size()) - 1;
  CardinalityPmf pmf;
  pmf.probs = Eigen::VectorXd::Zero(M + 1);
  if (q <= 0.0) {
    pmf.probs(0) = rho.sum();
  } else if (q >= 1.0) {
    pmf.probs = rho;
  } else {
    const double lq = std::log(q), l1q = std::log1p(-q);
    for (int m = 0; m <= M; ++m) {
      if (rho(m) == 0.0) continue;
      for (int n = 0; n <= m; ++n) {
        double logc = std::lgamma(m + 1.0) - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0);
        pmf.probs(n) += rho(m) * std::exp(logc + n * lq + (m - n) * l1q);
      }
    }
  }
  clamp_pmf(pmf.probs);
  return pmf;
}

CardinalityPmf mb_fov_pmf_direct(const MbComponents& mb, const Region& S,
                                 const InclusionConfig& cfg) {
  validate(mb);
  const int M = mb.size();
  if (M > 12) throw std::invalid_argument("mb_fov_pmf_direct: more than 12 components");

  Eigen::VectorXd q(M);
  for (int i = 0; i < M; ++i) q(i) = component_inclusion(mb.densities[i], S, cfg, nullptr);

  CardinalityPmf pmf;
  pmf.probs = Eigen::VectorXd::Zero(M + 1);
  // Odometer over absent / present-inside / present-outside per component.
  std::vector<int> state(M, 0);
  while (true) {
    double p = 1.0;
    int n = 0;
    for (int i = 0; i < M; ++i) {
      switch (state[i]) {
        case 0: p *= 1.0 - mb.r[i]; break;
        case 1:
          p *= mb.r[i] * q(i);
          ++n;
          break;
        default: p *= mb.r[i] * (1.0 - q(i)); break;
      }
    }
    pmf.probs(n) += p;
    int i = 0;
    while (i < M && ++state[i] == 3) state[i++] = 0;
    if (i == M) break;
  }
  clamp_pmf(pmf.probs);
  return pmf;
}

CardinalityPmf mb_fov_pmf_dft(const MbComponents& mb, const Region& S,
                              const InclusionConfig& cfg) {
  validate(mb);
  const int M = mb.size();
  Eigen::VectorXd q(M);
  for (int i = 0; i < M; ++i)
    q(i) = mb.r[i] * component_inclusion(mb.densities[i], S, cfg, nullptr);
  CardinalityPmf pmf;
  pmf.probs = poisson_binomial_dft(q);
  return pmf;
}

CardinalityPmf glmb_fov_pmf(const GlmbParams& glmb, const Region& S, const InclusionConfig& cfg) {
  validate(glmb);
  if (glmb.hypotheses.empty()) throw std::invalid_argument("glmb_fov_pmf: no hypotheses");

  int max_card = 0;
  for (const auto& h : glmb.hypotheses)
    max_card = std::max(max_card, static_cast<int>(h.labels.size()));

  CardinalityPmf pmf;
  pmf.probs = Eigen::VectorXd::Zero(max_card + 1);
  for (const auto& h : glmb.hypotheses) {
    if (h.weight == 0.0) continue;
    const int M = static_cast<int>(h.labels.size());
    if (M == 0) {
      pmf.probs(0) += h.weight;
      continue;
    }
    Eigen::VectorXd q(M);
    for (int i = 0; i < M; ++i) q(i) = component_inclusion(h.densities[i], S, cfg, nullptr);
    Eigen::VectorXd sub = poisson_binomial_dft(q);
    pmf.probs.head(sub.size()) += h.weight * sub;
  }
  clamp_pmf(pmf.probs);
  return pmf;
}

}  // namespace fovsplit
