#pragma once

#include <Eigen/Dense>

#include <map>
#include <shared_mutex>
#include <string>

namespace fovsplit {

// Univariate split of the standard normal into R equal-variance components:
//   q~(x) = sum_j w_j N(x; m_j, sigma^2)
// Means ascending and antisymmetric, weights mirrored, weights sum to 1.
struct SplitParams {
  Eigen::VectorXd weights;
  Eigen::VectorXd means;
  double sigma = 0.0;

  int R() const { return static_cast<int>(weights.size()); }
};

struct SplitGradient {
  Eigen::VectorXd d_weights;
  Eigen::VectorXd d_means;
  double d_sigma = 0.0;
};

void validate(const SplitParams& p);

// J = integral (N(0,1) - q~)^2 + lambda sigma^2, in closed form from pairwise
// Gaussian product integrals. Evaluates off the constraint manifold too (the
// weights need not sum to 1), which the finite-difference checks rely on.
double split_cost(const SplitParams& p, double lambda);

// Analytic gradient of split_cost in the natural variables (w, m, sigma).
SplitGradient split_cost_gradient(const SplitParams& p, double lambda);

struct OptimizeResult {
  SplitParams params;
  double cost = 0.0;
  double grad_norm = 0.0;  // in the reduced unconstrained coordinates
};

// Minimizes split_cost over the symmetry-constrained family with a BFGS
// quasi-Newton iteration on a reduced parameterization (softmax half-weights,
// free half-means, log sigma), 8 deterministic seeded starts. Throws if no
// start reaches gradient norm <= 1e-7.
OptimizeResult optimize_split(int R, double lambda);

// Cache of optimized splits keyed by "R:lambda". Lookup of a missing entry
// runs the optimizer and caches the result. Reads are shared, writes
// exclusive.
class SplitLibrary {
 public:
  struct Entry {
    SplitParams params;
    double cost = 0.0;
  };

  SplitLibrary();  // seeded with the R=3 and R=4 entries at lambda=0.001

  SplitParams lookup(int R, double lambda);
  void insert(int R, double lambda, Entry entry);
  bool has(int R, double lambda) const;
  std::map<std::string, Entry> entries() const;

  static std::string key(int R, double lambda);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
};

SplitLibrary& default_split_library();

}  // namespace fovsplit
