#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "fovsplit/gaussmix.hpp"
#include "fovsplit/regions.hpp"
#include "fovsplit/splitter.hpp"

namespace fovsplit {

// PMF of the number of objects inside a field of view. Entries are clamped
// to [0, 1]; truncated models sum to 1 within the truncation tolerance.
struct CardinalityPmf {
  Eigen::VectorXd probs;

  double mean() const;
  double variance() const;
};

// rho_S(0): probability the field of view is empty.
double void_probability(const CardinalityPmf& pmf);

// Poisson point process with Gaussian-mixture intensity D (unnormalized).
struct PoissonIntensity {
  GaussianMixture phd;

  double n_global() const { return phd.total_weight(); }
};

// Multi-Bernoulli components; existence probabilities strictly below 1.
// Spatial densities are normalized mixtures.
struct MbComponents {
  std::vector<double> r;
  std::vector<GaussianMixture> densities;

  int size() const { return static_cast<int>(r.size()); }
};

struct GlmbHypothesis {
  double weight = 0.0;
  std::vector<int> labels;
  std::vector<GaussianMixture> densities;  // aligned with labels
};

struct GlmbParams {
  std::vector<GlmbHypothesis> hypotheses;
};

void validate(const PoissonIntensity& d);
void validate(const MbComponents& mb);
void validate(const GlmbParams& glmb);

enum class InclusionMethod { kSplit, kMonteCarlo };

struct InclusionConfig {
  InclusionMethod method = InclusionMethod::kSplit;
  SplitConfig split;
  int mc_samples = 100000;
  std::uint64_t mc_seed = 1234;
};

struct InclusionEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for the split path
};

// <1_S, p> for a normalized density p: FoV-split partition mass, or a seeded
// Monte Carlo fraction with its standard error.
InclusionEstimate inclusion_probability(const GaussianMixture& density, const Region& S,
                                        const InclusionConfig& cfg);

// Known point estimates: |X ∩ S| is deterministic.
CardinalityPmf conditional_fov_pmf(const std::vector<Eigen::VectorXd>& points, const Region& S);

// Each point inside S is seen independently with probability p_d; exhaustive
// subset sum, at most 20 points.
CardinalityPmf conditional_fov_pmf(const std::vector<Eigen::VectorXd>& points, const Region& S,
                                   double p_d);

// Truncated double sum over the count inside and outside S; both truncations
// spend eps_tail/2. Thinning makes the exact answer Poisson(<1_S, D>), which
// the tests use as the oracle.
CardinalityPmf poisson_fov_pmf(const PoissonIntensity& intensity, const Region& S,
                               const InclusionConfig& cfg, double eps_tail = 1e-12);

// IID cluster process with cardinality rho and common spatial density p:
// binomial thinning mixture over rho.
CardinalityPmf iidc_fov_pmf(const Eigen::VectorXd& rho, const GaussianMixture& spatial,
                            const Region& S, const InclusionConfig& cfg);

// Literal enumeration over the 3^M absent / inside / outside assignments.
// Independent of the Poisson-binomial identity, hence the cross-check oracle
// for the DFT path. M <= 12.
CardinalityPmf mb_fov_pmf_direct(const MbComponents& mb, const Region& S,
                                 const InclusionConfig& cfg);

// Poisson-binomial over q_i = r_i <1_S, p_i> evaluated with a DFT over the
// (M+1)-th roots of unity.
CardinalityPmf mb_fov_pmf_dft(const MbComponents& mb, const Region& S,
                              const InclusionConfig& cfg);

// Hypothesis-weighted mixture of Poisson-binomial PMFs; labels under a
// hypothesis exist surely, so q_i = <1_S, p_i>.
CardinalityPmf glmb_fov_pmf(const GlmbParams& glmb, const Region& S, const InclusionConfig& cfg);

}  // namespace fovsplit
