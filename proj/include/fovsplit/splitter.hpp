#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fovsplit/gaussmix.hpp"
#include "fovsplit/regions.hpp"
#include "fovsplit/splitlib.hpp"

namespace fovsplit {

struct SplitConfig {
  double w_min = 0.01;  // components below this weight are never split
  int R = 3;
  double lambda = 0.001;
  GridSpec grid{3.0, 7};
  int max_depth = 10;

  // Library consulted for the univariate split; defaults to the process-wide
  // cache.
  SplitLibrary* library = nullptr;
};

void validate(const SplitConfig& cfg);

// Inclusion flags of one component against a set of regions: entry (z, l) is
// membership of collocation point l (mapped through the component frame) in
// region z.
using InclusionFlags = std::vector<std::vector<bool>>;

InclusionFlags inclusion_flags(const GaussianComponent& c, int n_s,
                               const std::vector<Region>& regions, const CollocationGrid& grid);

// True when any region sees both included and excluded collocation points.
bool needs_split(const InclusionFlags& d);

// Axis j* of the component frame whose axis-orthogonal collocation planes are
// most consistent (all flags equal per region on each plane). Ties resolve to
// the smallest index; eigenvalues are stored descending, so that is the
// largest-variance direction.
int position_split_direction(const InclusionFlags& d, const CollocationGrid& grid,
                             const EigenBasis& basis);

// Index of the full-state eigenvector most aligned with the position split
// direction, i.e. argmax_k |[v_s^T 0^T] v_k|; ties resolve to the smallest
// index.
int fullstate_split_index(const EigenBasis& full_basis, const Eigen::VectorXd& v_pos, int n_s);

// Replaces one component by the library split along full-state eigenvector
// k: lambda_k is scaled by sigma^2 and the means fan out along v_k by
// sqrt(lambda_k) m_j. Weights scale by the library weights.
std::vector<GaussianComponent> split_component(const GaussianComponent& c,
                                               const EigenBasis& full_basis, int k,
                                               const SplitParams& split);

struct SplitResult {
  GaussianMixture gm;
  bool depth_exhausted = false;  // straddling components remained at the cap
};

// Recursive refinement of the mixture against one region (or several). Each
// pass splits every component whose collocation flags are mixed in some
// region; components fully inside or outside all regions, or below w_min,
// pass through untouched.
SplitResult split_for_fov(const GaussianMixture& gm, const SplitConfig& cfg, const Region& S);
SplitResult split_for_multifov(const GaussianMixture& gm, const SplitConfig& cfg,
                               const std::vector<Region>& regions);

// Mean-based partition: a component belongs inside iff its position-marginal
// mean lies in S (boundary counts inside). Weights are preserved, so the two
// parts are sub-normalized.
struct Partition {
  GaussianMixture inside;
  GaussianMixture outside;
};

Partition partition(const GaussianMixture& gm, const Region& S);

}  // namespace fovsplit
