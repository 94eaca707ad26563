#include "fovsplit/splitter.hpp"

#include <cmath>
#include <stdexcept>

namespace fovsplit {

namespace {

// Flags for precomputed state-space collocation points, one row per region.
InclusionFlags flags_for_points(const std::vector<Region>& regions,
                                const Eigen::MatrixXd& state_points) {
  const int L = static_cast<int>(state_points.cols());
  InclusionFlags d(regions.size());
  for (size_t z = 0; z < regions.size(); ++z) {
    d[z].resize(L);
    for (int l = 0; l < L; ++l) d[z][l] = contains(regions[z], state_points.col(l));
  }
  return d;
}

Eigen::MatrixXd map_grid_to_state(const ComponentFrame& frame, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd s = frame.basis.vectors * (frame.sqrt_values.asDiagonal() * y);
  s.colwise() += frame.mean;
  return s;
}

}  // namespace

void validate(const SplitConfig& cfg) {
  if (!(cfg.w_min >= 0.0) || cfg.w_min >= 1.0)
    throw std::invalid_argument("SplitConfig: w_min must lie in [0, 1)");
  if (cfg.R < 1) throw std::invalid_argument("SplitConfig: R must be >= 1");
  if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("SplitConfig: lambda must be >= 0");
  if (cfg.grid.n_g < 2) throw std::invalid_argument("SplitConfig: n_g must be >= 2");
  if (!(cfg.grid.zeta > 0.0)) throw std::invalid_argument("SplitConfig: zeta must be positive");
  if (cfg.max_depth < 1) throw std::invalid_argument("SplitConfig: max_depth must be >= 1");
}

InclusionFlags inclusion_flags(const GaussianComponent& c, int n_s,
                               const std::vector<Region>& regions, const CollocationGrid& grid) {
  ComponentFrame frame = to_frame(c, n_s);
  return flags_for_points(regions, map_grid_to_state(frame, grid.points));
}

bool needs_split(const InclusionFlags& d) {
  for (const auto& row : d) {
    bool any_in = false, any_out = false;
    for (bool f : row) (f ? any_in : any_out) = true;
    if (any_in && any_out) return true;
  }
  return false;
}

int position_split_direction(const InclusionFlags& d, const CollocationGrid& grid,
                             const EigenBasis& basis) {
  const int n_s = static_cast<int>(grid.indices.rows());
  const int L = static_cast<int>(grid.indices.cols());
  if (basis.values.size() != n_s)
    throw std::invalid_argument("position_split_direction: basis/grid dimension mismatch");

  int best_j = 0;
  int best_score = -1;
  for (int j = 0; j < n_s; ++j) {
    // A plane is the set of lattice points sharing the j-th index. Empty
    // planes are vacuously consistent.
    int score = 0;
    for (int plane = 0; plane < grid.n_g; ++plane) {
      bool consistent = true;
      for (size_t z = 0; z < d.size() && consistent; ++z) {
        int seen = -1;
        for (int l = 0; l < L; ++l) {
          if (grid.indices(j, l) != plane) continue;
          int f = d[z][l] ? 1 : 0;
          if (seen < 0) seen = f;
          else if (seen != f) {
            consistent = false;
            break;
          }
        }
      }
      if (consistent) ++score;
    }
    if (score > best_score) {
      best_score = score;
      best_j = j;
    }
  }
  return best_j;
}

int fullstate_split_index(const EigenBasis& full_basis, const Eigen::VectorXd& v_pos, int n_s) {
  const int n_x = static_cast<int>(full_basis.values.size());
  if (n_s > n_x || v_pos.size() != n_s)
    throw std::invalid_argument("fullstate_split_index: dimension mismatch");
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n_x);
  padded.head(n_s) = v_pos;
  int best_k = 0;
  double best = -1.0;
  for (int k = 0; k < n_x; ++k) {
    double a = std::abs(padded.dot(full_basis.vectors.col(k)));
    if (a > best) {
      best = a;
      best_k = k;
    }
  }
  return best_k;
}

std::vector<GaussianComponent> split_component(const GaussianComponent& c,
                                               const EigenBasis& full_basis, int k,
                                               const SplitParams& split) {
  const int n_x = c.dim();
  if (k < 0 || k >= n_x) throw std::invalid_argument("split_component: k out of range");
  const double lam = full_basis.values(k);
  const Eigen::VectorXd v = full_basis.vectors.col(k);
  const double s2 = split.sigma * split.sigma;

  // Rank-1 variance update keeps the orthogonal directions bit-exact.
  Eigen::MatrixXd cov = c.cov + (s2 - 1.0) * lam * (v * v.transpose());
  cov = 0.5 * (cov + cov.transpose());

  std::vector<GaussianComponent> out;
  out.reserve(split.R());
  const double step = std::sqrt(lam);
  for (int j = 0; j < split.R(); ++j) {
    GaussianComponent cj;
    cj.weight = c.weight * split.weights(j);
    cj.mean = c.mean + step * split.means(j) * v;
    cj.cov = cov;
    out.push_back(std::move(cj));
  }
  return out;
}

SplitResult split_for_fov(const GaussianMixture& gm, const SplitConfig& cfg, const Region& S) {
  return split_for_multifov(gm, cfg, std::vector<Region>{S});
}

SplitResult split_for_multifov(const GaussianMixture& gm, const SplitConfig& cfg,
                               const std::vector<Region>& regions) {
  validate(cfg);
  if (regions.empty()) throw std::invalid_argument("split_for_multifov: no regions");
  const int n_s = gm.position_dim;
  if (n_s < 1) throw std::invalid_argument("split_for_multifov: mixture has no position block");
  for (const auto& r : regions)
    if (r.dim() != n_s)
      throw std::invalid_argument("split_for_multifov: region dimension != position_dim");

  SplitLibrary& lib = cfg.library ? *cfg.library : default_split_library();
  const SplitParams sp = lib.lookup(cfg.R, cfg.lambda);
  const CollocationGrid grid = collocation_points(cfg.grid, n_s);

  SplitResult result;
  result.gm.dim = gm.dim;
  result.gm.position_dim = gm.position_dim;
  result.gm.normalized = gm.normalized;

  // Depth-first over the split tree, children in library (ascending-mean)
  // order, so the output ordering is independent of the region list order.
  struct Item {
    GaussianComponent c;
    int depth;
  };
  std::vector<Item> stack;
  for (auto it = gm.components.rbegin(); it != gm.components.rend(); ++it)
    stack.push_back({*it, 0});

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    if (item.c.weight < cfg.w_min) {
      result.gm.components.push_back(std::move(item.c));
      continue;
    }
    ComponentFrame frame = to_frame(item.c, n_s);
    InclusionFlags d = flags_for_points(regions, map_grid_to_state(frame, grid.points));
    if (!needs_split(d)) {
      result.gm.components.push_back(std::move(item.c));
      continue;
    }
    if (item.depth >= cfg.max_depth) {
      result.gm.components.push_back(std::move(item.c));
      result.depth_exhausted = true;
      continue;
    }
    int j_star = position_split_direction(d, grid, frame.basis);
    EigenBasis full = eig_decompose(item.c.cov);
    int k_star = fullstate_split_index(full, frame.basis.vectors.col(j_star), n_s);
    std::vector<GaussianComponent> children = split_component(item.c, full, k_star, sp);
    for (auto it = children.rbegin(); it != children.rend(); ++it)
      stack.push_back({std::move(*it), item.depth + 1});
  }
  return result;
}

Partition partition(const GaussianMixture& gm, const Region& S) {
  const int n_s = gm.position_dim;
  if (n_s < 1) throw std::invalid_argument("partition: mixture has no position block");
  if (S.dim() != n_s) throw std::invalid_argument("partition: region dimension != position_dim");

  Partition p;
  p.inside.dim = p.outside.dim = gm.dim;
  p.inside.position_dim = p.outside.position_dim = gm.position_dim;
  p.inside.normalized = p.outside.normalized = false;
  for (const auto& c : gm.components) {
    if (contains(S, c.mean.head(n_s)))
      p.inside.components.push_back(c);
    else
      p.outside.components.push_back(c);
  }
  return p;
}

}  // namespace fovsplit
