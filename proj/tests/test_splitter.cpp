#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fovsplit/splitter.hpp"
#include "support/quadrature.hpp"
#include "support/random_models.hpp"

using namespace fovsplit;

namespace {

Eigen::VectorXd pt(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

GaussianMixture single(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       double weight = 1.0, int position_dim = -1) {
  GaussianMixture gm;
  gm.dim = static_cast<int>(mean.size());
  gm.position_dim = position_dim < 0 ? gm.dim : position_dim;
  GaussianComponent c;
  c.weight = weight;
  c.mean = mean;
  c.cov = cov;
  gm.components.push_back(std::move(c));
  gm.normalized = weight == 1.0;
  return gm;
}

MixtureMoments raw_moments(const GaussianMixture& gm) { return mixture_moments(gm); }

}  // namespace

TEST_CASE("inclusion flags and needs_split on a straddling component") {
  GaussianComponent c;
  c.weight = 1.0;
  c.mean = pt(0.0, 0.0);
  c.cov = Eigen::Matrix2d::Identity();
  CollocationGrid grid = collocation_points(GridSpec{3.0, 7}, 2);

  std::vector<Region> regions = {make_halfspace(pt(1.0, 0.0), 0.0)};
  InclusionFlags flags = inclusion_flags(c, 2, regions, grid);
  REQUIRE(flags.size() == 1);
  REQUIRE(static_cast<int>(flags[0].size()) == grid.points.cols());
  CHECK(needs_split(flags));

  // Fully inside: region covers every collocation point.
  std::vector<Region> wide = {make_disc(pt(0.0, 0.0), 50.0)};
  CHECK_FALSE(needs_split(inclusion_flags(c, 2, wide, grid)));

  // Fully outside.
  std::vector<Region> far = {make_disc(pt(100.0, 0.0), 1.0)};
  CHECK_FALSE(needs_split(inclusion_flags(c, 2, far, grid)));
}

TEST_CASE("position split direction picks the boundary-orthogonal axis") {
  // Isotropic component: frame axes align with state axes. A vertical
  // boundary (x >= 0) leaves planes of constant x consistent, so axis 0 is
  // chosen.
  GaussianComponent c;
  c.weight = 1.0;
  c.mean = pt(0.0, 0.0);
  c.cov = Eigen::Matrix2d::Identity();
  ComponentFrame frame = to_frame(c, 2);
  CollocationGrid grid = collocation_points(GridSpec{3.0, 7}, 2);
  std::vector<Region> regions = {make_halfspace(pt(1.0, 0.0), 0.0)};
  InclusionFlags flags = inclusion_flags(c, 2, regions, grid);
  int j = position_split_direction(flags, grid, frame.basis);
  Eigen::VectorXd dir = frame.basis.vectors.col(j);
  CHECK(std::abs(dir.dot(pt(1.0, 0.0))) == doctest::Approx(1.0).epsilon(1e-12));

  // Anisotropic component elongated along y with the same boundary: the
  // chosen frame axis must still map to the x direction in state space.
  GaussianComponent c2;
  c2.weight = 1.0;
  c2.mean = pt(0.0, 0.0);
  c2.cov = Eigen::Vector2d(0.25, 9.0).asDiagonal();
  ComponentFrame frame2 = to_frame(c2, 2);
  InclusionFlags flags2 = inclusion_flags(c2, 2, regions, grid);
  int j2 = position_split_direction(flags2, grid, frame2.basis);
  Eigen::VectorXd dir2 = frame2.basis.vectors.col(j2);
  CHECK(std::abs(dir2.dot(pt(1.0, 0.0))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fullstate split index aligns with the position direction") {
  // 4-D CV-style covariance with position-velocity coupling.
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
  P(0, 0) = 4.0;
  P(0, 2) = P(2, 0) = 1.2;
  P(1, 1) = 2.0;
  EigenBasis full = eig_decompose(P);
  Eigen::VectorXd v_pos = pt(1.0, 0.0);
  int k = fullstate_split_index(full, v_pos, 2);
  // Verify argmax by brute force.
  double best = -1.0;
  int best_k = -1;
  for (int i = 0; i < 4; ++i) {
    double a = std::abs(full.vectors.col(i).head(2).dot(v_pos));
    if (a > best) {
      best = a;
      best_k = i;
    }
  }
  CHECK(k == best_k);
}

TEST_CASE("split_component conserves weight exactly and mean to 1e-9") {
  std::mt19937_64 rng(17);
  SplitLibrary lib;
  SplitParams split = lib.lookup(4, 0.001);
  for (int trial = 0; trial < 50; ++trial) {
    GaussianComponent c;
    c.weight = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    c.mean = Eigen::VectorXd::Zero(4);
    for (int i = 0; i < 4; ++i)
      c.mean(i) = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    c.cov = testsupport::random_spd(4, rng, 0.3, 4.0);
    EigenBasis full = eig_decompose(c.cov);
    int k = static_cast<int>(rng() % 4);
    std::vector<GaussianComponent> parts = split_component(c, full, k, split);
    REQUIRE(parts.size() == 4);

    double w = 0.0;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (const auto& part : parts) {
      w += part.weight;
      mean += part.weight * part.mean;
    }
    CHECK(w == doctest::Approx(c.weight).epsilon(1e-15));
    CHECK((mean / w - c.mean).norm() <= 1e-9);
  }
}

TEST_CASE("split_component covariance follows the eigenvalue scaling identity") {
  // Mixture covariance of the split equals V diag(l_1, ..., s2 l_k, ..., l_n) V^T
  // with s2 = sigma^2 + sum w m^2 of the univariate split parameters.
  std::mt19937_64 rng(19);
  SplitLibrary lib;
  SplitParams split = lib.lookup(4, 0.001);
  const double s2 =
      split.sigma * split.sigma + (split.weights.array() * split.means.array().square()).sum();

  GaussianComponent c;
  c.weight = 0.8;
  c.mean = Eigen::Vector3d(1.0, -2.0, 0.5);
  c.cov = testsupport::random_spd(3, rng, 0.5, 3.0);
  EigenBasis full = eig_decompose(c.cov);
  const int k = 1;
  std::vector<GaussianComponent> parts = split_component(c, full, k, split);

  GaussianMixture gm;
  gm.dim = 3;
  gm.position_dim = 3;
  gm.components = parts;
  MixtureMoments mm = raw_moments(gm);
  Eigen::VectorXd scaled = full.values;
  scaled(k) *= s2;
  Eigen::MatrixXd expect = full.vectors * scaled.asDiagonal() * full.vectors.transpose();
  CHECK((mm.cov - expect).norm() <= 1e-6 * expect.norm());
  // The split contracts the chosen direction: s2 < 1.
  CHECK(s2 < 1.0);
  CHECK(s2 > 0.9);
}

TEST_CASE("split_for_fov conserves mass and mean over random instances") {
  std::mt19937_64 rng(23);
  SplitConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    GaussianMixture gm = testsupport::random_mixture(2, 1 + static_cast<int>(rng() % 3), rng);
    Region region = testsupport::random_region(rng);
    SplitResult res = split_for_fov(gm, cfg, region);
    CHECK(std::abs(res.gm.total_weight() - gm.total_weight()) <= 1e-12);
    MixtureMoments before = raw_moments(gm);
    MixtureMoments after = raw_moments(res.gm);
    CHECK((before.mean - after.mean).norm() <= 1e-9);
    CHECK(res.gm.size() >= gm.size());
  }
}

TEST_CASE("split mass against a half-plane approaches the normal CDF") {
  // Standard normal, boundary through the mean: exact inside mass is 1/2.
  GaussianMixture gm = single(pt(0.0, 0.0), Eigen::Matrix2d::Identity());
  Region hs = make_halfspace(pt(1.0, 0.0), 0.0);

  // Depth 0 is no refinement at all: the whole component lands on the side
  // its mean points to. Deeper recursions must never do worse.
  double prev_err = std::abs(partition(gm, hs).inside.total_weight() - 0.5);
  CHECK(prev_err == doctest::Approx(0.5));
  for (int depth = 1; depth <= 3; ++depth) {
    SplitConfig cfg;
    cfg.max_depth = depth;
    SplitResult res = split_for_fov(gm, cfg, hs);
    Partition parts = partition(res.gm, hs);
    double err = std::abs(parts.inside.total_weight() - 0.5);
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
  }

  // At the default recursion budget the estimate lands within two percent.
  SplitConfig deep;
  SplitResult res_deep = split_for_fov(gm, deep, hs);
  CHECK(std::abs(partition(res_deep.gm, hs).inside.total_weight() - 0.5) <= 0.02);

  // Off-center boundary: exact mass is Phi(0.7) for region x <= 0.7.
  Region hs2 = make_complement(make_halfspace(pt(1.0, 0.0), 0.7));
  SplitConfig cfg;
  SplitResult res = split_for_fov(gm, cfg, hs2);
  Partition parts = partition(res.gm, hs2);
  double expect = testsupport::normal_cdf(0.7);
  CHECK(parts.inside.total_weight() == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("multifov refinement is invariant to region order") {
  std::mt19937_64 rng(31);
  SplitConfig cfg;
  cfg.max_depth = 6;
  for (int trial = 0; trial < 50; ++trial) {
    GaussianMixture gm = testsupport::random_mixture(2, 2, rng);
    std::vector<Region> ab = {testsupport::random_region(rng), testsupport::random_region(rng)};
    std::vector<Region> ba = {ab[1], ab[0]};
    SplitResult r1 = split_for_multifov(gm, cfg, ab);
    SplitResult r2 = split_for_multifov(gm, cfg, ba);
    REQUIRE(r1.gm.size() == r2.gm.size());
    CHECK(r1.depth_exhausted == r2.depth_exhausted);
    for (int i = 0; i < r1.gm.size(); ++i) {
      CHECK(std::abs(r1.gm.components[i].weight - r2.gm.components[i].weight) <= 1e-12);
      CHECK((r1.gm.components[i].mean - r2.gm.components[i].mean).lpNorm<Eigen::Infinity>() <=
            1e-12);
      CHECK((r1.gm.components[i].cov - r2.gm.components[i].cov).lpNorm<Eigen::Infinity>() <=
            1e-12);
    }
  }
}

TEST_CASE("components below w_min pass through unsplit but are retained") {
  GaussianMixture gm = single(pt(0.0, 0.0), Eigen::Matrix2d::Identity(), 0.005);
  Region hs = make_halfspace(pt(1.0, 0.0), 0.0);
  SplitConfig cfg;  // w_min = 0.01
  SplitResult res = split_for_fov(gm, cfg, hs);
  REQUIRE(res.gm.size() == 1);
  CHECK(res.gm.components[0].weight == 0.005);
  CHECK_FALSE(res.depth_exhausted);
}

TEST_CASE("depth cap reports exhaustion, and components stay within it") {
  GaussianMixture gm = single(pt(0.0, 0.0), Eigen::Matrix2d::Identity());
  Region hs = make_halfspace(pt(1.0, 0.0), 0.0);
  SplitConfig cfg;
  cfg.max_depth = 2;
  cfg.w_min = 0.0;  // never pass through on weight
  SplitResult res = split_for_fov(gm, cfg, hs);
  CHECK(res.depth_exhausted);
  // With R=3 and two levels, at most 9 components.
  CHECK(res.gm.size() <= 9);

  // Depth 10 with default w_min terminates without exhaustion on this case.
  SplitConfig deep;
  SplitResult res10 = split_for_fov(gm, deep, hs);
  CHECK(res10.gm.size() >= res.gm.size());
}

TEST_CASE("partition assigns by position-marginal mean, boundary inside") {
  GaussianMixture gm;
  gm.dim = 2;
  gm.position_dim = 2;
  for (double x : {-1.0, 0.0, 1.0}) {
    GaussianComponent c;
    c.weight = 1.0 / 3.0;
    c.mean = pt(x, 0.0);
    c.cov = Eigen::Matrix2d::Identity();
    gm.components.push_back(c);
  }
  gm.normalized = true;
  Region hs = make_halfspace(pt(1.0, 0.0), 0.0);
  Partition parts = partition(gm, hs);
  CHECK(parts.inside.size() == 2);   // x = 0 (boundary) and x = 1
  CHECK(parts.outside.size() == 1);  // x = -1
  CHECK(parts.inside.total_weight() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(parts.inside.normalized);
  CHECK_FALSE(parts.outside.normalized);
  CHECK(parts.inside.dim == 2);
  CHECK(parts.inside.position_dim == 2);
}

TEST_CASE("split config validation") {
  SplitConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  SplitConfig bad = cfg;
  bad.R = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.grid.n_g = 1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.grid.zeta = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.w_min = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.max_depth = -1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("velocity dimensions ride along: 4-D state, 2-D position region") {
  std::mt19937_64 rng(37);
  GaussianMixture gm;
  gm.dim = 4;
  gm.position_dim = 2;
  GaussianComponent c;
  c.weight = 1.0;
  c.mean = Eigen::Vector4d(0.0, 0.0, 1.0, -0.5);
  c.cov = testsupport::random_spd(4, rng, 0.5, 2.0);
  gm.components.push_back(c);
  gm.normalized = true;

  Region hs = make_halfspace(pt(1.0, 0.0), 0.0);
  SplitConfig cfg;
  SplitResult res = split_for_fov(gm, cfg, hs);
  CHECK(res.gm.size() > 1);
  CHECK(std::abs(res.gm.total_weight() - 1.0) <= 1e-12);
  MixtureMoments before = raw_moments(gm);
  MixtureMoments after = raw_moments(res.gm);
  CHECK((before.mean - after.mean).norm() <= 1e-9);
  for (const auto& part : res.gm.components) {
    CHECK(part.mean.size() == 4);
    CHECK(part.cov.rows() == 4);
  }
}
