#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace fovsplit {

// Weighted Gaussian component. Position states occupy the leading indices of
// mean/cov so the position marginal is always the top-left block.
struct GaussianComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Gaussian mixture over an n_x-dimensional state whose first position_dim
// coordinates are position. FoV-partitioned mixtures are legitimately
// sub-normalized, so normalization is an explicit flag, not an assumption.
struct GaussianMixture {
  std::vector<GaussianComponent> components;
  int dim = 0;
  int position_dim = 0;
  bool normalized = false;

  int size() const { return static_cast<int>(components.size()); }
  bool empty() const { return components.empty(); }
  double total_weight() const;
  double pdf(const Eigen::VectorXd& x) const;
};

// Eigendecomposition of a covariance: eigenvalues descending, each eigenvector
// scaled so its largest-magnitude entry is positive (first such index on ties).
struct EigenBasis {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, same order as values
};

struct MixtureMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Throws std::invalid_argument on malformed inputs (non-finite entries,
// negative weight, non-symmetric covariance).
void validate(const GaussianComponent& c);
void validate(const GaussianMixture& gm);

// Density of N(x; mean, cov). Throws if cov is not positive definite.
double gaussian_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov);

// Integral of the product of two Gaussian densities, N(m1; m2, P1 + P2).
double gaussian_product_integral(const Eigen::VectorXd& m1, const Eigen::MatrixXd& P1,
                                 const Eigen::VectorXd& m2, const Eigen::MatrixXd& P2);

// Symmetrizes the input, then decomposes. Throws on non-finite entries or a
// non-positive-definite result, and on asymmetry beyond 1e-10 relative.
EigenBasis eig_decompose(const Eigen::MatrixXd& cov);

// Integrated squared difference of two mixture densities (not its square
// root). Closed form via pairwise Gaussian product integrals; result is
// clamped to [0, inf).
double l2_distance(const GaussianMixture& f, const GaussianMixture& g);

// Greedy pairwise merging down to max_components, choosing at each step the
// pair with the smallest merge cost
//   B(i,j) = 0.5 [ (w_i+w_j) log det P_ij - w_i log det P_i - w_j log det P_j ]
// where P_ij is the moment-matched merge. Components with weight < 1e-8 are
// pruned first, rescaling survivors to preserve the total weight. A mixture
// already at or below the cap is returned unchanged.
GaussianMixture reduce(const GaussianMixture& gm, int max_components);

// Mean and covariance of the mixture density, normalizing by the total
// weight. Throws on an empty mixture or zero total weight.
MixtureMoments mixture_moments(const GaussianMixture& gm);

// Marginal of the leading n_s coordinates. Weight carries over unchanged.
GaussianComponent position_marginal(const GaussianComponent& c, int n_s);
GaussianMixture position_marginal(const GaussianMixture& gm);

// Draws n samples (one per column) from the weight-normalized mixture via
// per-component Cholesky factors. Deterministic for a given generator state.
Eigen::MatrixXd sample_mixture(const GaussianMixture& gm, int n, std::mt19937_64& rng);

}  // namespace fovsplit
