// End-to-end acceptance gate. Each criterion below is a standalone check of
// a contract the library ships with; the binary prints one PASS/FAIL line
// per criterion and exits with the number of failures. Tolerances are pinned
// here on purpose: loosening one is a release decision, not a test tweak.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fovsplit/bernoulli.hpp"
#include "fovsplit/cardinality.hpp"
#include "fovsplit/scenarios.hpp"
#include "fovsplit/splitlib.hpp"
#include "fovsplit/splitter.hpp"

#include "support/pb_oracle.hpp"
#include "support/pf_oracle.hpp"
#include "support/quadrature.hpp"
#include "support/random_models.hpp"

using namespace fovsplit;

namespace {

struct Failure {
  std::string detail;
};

#define ACCEPT(cond, msg)                         \
  do {                                            \
    if (!(cond)) {                                \
      std::ostringstream os_;                     \
      os_ << msg;                                 \
      throw Failure{os_.str()};                   \
    }                                             \
  } while (0)

Eigen::Vector2d pt(double x, double y) { return Eigen::Vector2d(x, y); }

GaussianMixture single(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       int position_dim = -1) {
  GaussianMixture gm;
  gm.dim = static_cast<int>(mean.size());
  gm.position_dim = position_dim < 0 ? gm.dim : position_dim;
  GaussianComponent c;
  c.weight = 1.0;
  c.mean = mean;
  c.cov = cov;
  gm.components.push_back(c);
  gm.normalized = true;
  return gm;
}

double poisson_pmf(int k, double mu) {
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

// Mirrors the unit-test generator: mirrored weights and means, weights
// normalized, so the point is feasible but otherwise arbitrary.
SplitParams random_split_point(int R, std::mt19937_64& rng) {
  const int H = R / 2;
  const bool odd = R % 2 == 1;
  std::uniform_real_distribution<double> wu(0.2, 1.0);
  std::uniform_real_distribution<double> mu(0.2, 2.5);
  std::uniform_real_distribution<double> su(0.3, 1.0);
  SplitParams p;
  p.weights.resize(R);
  p.means.resize(R);
  p.sigma = su(rng);
  std::vector<double> a(H), w(H);
  for (int i = 0; i < H; ++i) {
    a[i] = mu(rng);
    w[i] = wu(rng);
  }
  std::sort(a.begin(), a.end());
  double wc = odd ? wu(rng) : 0.0;
  double total = wc + 2.0 * std::accumulate(w.begin(), w.end(), 0.0);
  if (odd) {
    p.weights(H) = wc / total;
    p.means(H) = 0.0;
  }
  for (int i = 1; i <= H; ++i) {
    int pos = odd ? H + i : H + i - 1;
    int neg = H - i;
    p.weights(pos) = p.weights(neg) = w[i - 1] / total;
    p.means(pos) = a[i - 1];
    p.means(neg) = -a[i - 1];
  }
  return p;
}

// --- criterion 1: the 4-way univariate split optimum ---------------------

void split_table_reproduction() {
  const double kW[4] = {0.10766586425362, 0.39233413574638, 0.39233413574638, 0.10766586425362};
  const double kM[4] = {-1.42237156603631, -0.47412385534547, 0.47412385534547,
                        1.42237156603631};
  const double kSigma = 0.58160633157686;

  OptimizeResult res = optimize_split(4, 0.001);
  for (int i = 0; i < 4; ++i) {
    ACCEPT(std::abs(res.params.weights(i) - kW[i]) <= 1e-4,
           "weight " << i << " = " << res.params.weights(i) << " expected " << kW[i]);
    ACCEPT(std::abs(res.params.means(i) - kM[i]) <= 1e-4,
           "mean " << i << " = " << res.params.means(i) << " expected " << kM[i]);
  }
  ACCEPT(std::abs(res.params.sigma - kSigma) <= 1e-4,
         "sigma = " << res.params.sigma << " expected " << kSigma);
}

// --- criterion 2: refinement conserves mass and mean ----------------------

void split_conservation() {
  std::mt19937_64 rng(2023);
  SplitConfig cfg;  // default depth cap 10
  for (int trial = 0; trial < 200; ++trial) {
    GaussianMixture gm = testsupport::random_mixture(2, 1 + static_cast<int>(rng() % 3), rng);
    Region region = testsupport::random_region(rng);
    SplitResult res = split_for_fov(gm, cfg, region);
    double dw = std::abs(res.gm.total_weight() - gm.total_weight());
    ACCEPT(dw <= 1e-12, "trial " << trial << ": weight drift " << dw);
    MixtureMoments before = mixture_moments(gm);
    MixtureMoments after = mixture_moments(res.gm);
    double dm = (before.mean - after.mean).norm();
    ACCEPT(dm <= 1e-9, "trial " << trial << ": mean drift " << dm);
  }
}

// --- criterion 3: half-plane partition mass against the normal CDF --------

void halfplane_partition_mass() {
  GaussianMixture gm = single(pt(0.0, 0.0), Eigen::Matrix2d::Identity());
  Region hs = make_halfspace(pt(1.0, 0.0), 0.0);

  // Depth 0 means no refinement: the single component sits on one side.
  double prev_err = std::abs(partition(gm, hs).inside.total_weight() - 0.5);
  for (int depth = 1; depth <= 3; ++depth) {
    SplitConfig cfg;
    cfg.max_depth = depth;
    SplitResult res = split_for_fov(gm, cfg, hs);
    double err = std::abs(partition(res.gm, hs).inside.total_weight() - 0.5);
    ACCEPT(err <= prev_err + 1e-12,
           "error grew at depth " << depth << ": " << err << " > " << prev_err);
    prev_err = err;
  }

  SplitConfig cfg;  // default budget
  SplitResult res = split_for_fov(gm, cfg, hs);
  double mass = partition(res.gm, hs).inside.total_weight();
  ACCEPT(std::abs(mass - 0.5) <= 0.02, "inside mass " << mass << " vs analytic 0.5");
}

// --- criterion 4: multi-region refinement ignores region order ------------

void multifov_order_invariance() {
  std::mt19937_64 rng(31);
  SplitConfig cfg;
  cfg.max_depth = 6;
  for (int trial = 0; trial < 50; ++trial) {
    GaussianMixture gm = testsupport::random_mixture(2, 2, rng);
    std::vector<Region> ab = {testsupport::random_region(rng), testsupport::random_region(rng)};
    std::vector<Region> ba = {ab[1], ab[0]};
    SplitResult r1 = split_for_multifov(gm, cfg, ab);
    SplitResult r2 = split_for_multifov(gm, cfg, ba);
    ACCEPT(r1.gm.size() == r2.gm.size(),
           "trial " << trial << ": sizes " << r1.gm.size() << " vs " << r2.gm.size());
    for (int i = 0; i < r1.gm.size(); ++i) {
      const GaussianComponent& a = r1.gm.components[i];
      const GaussianComponent& b = r2.gm.components[i];
      double d = std::abs(a.weight - b.weight);
      d = std::max(d, (a.mean - b.mean).lpNorm<Eigen::Infinity>());
      d = std::max(d, (a.cov - b.cov).lpNorm<Eigen::Infinity>());
      ACCEPT(d <= 1e-12, "trial " << trial << " component " << i << ": divergence " << d);
    }
  }
}

// --- criterion 5: cardinality transforms against independent oracles ------

void cardinality_oracles() {
  InclusionConfig icfg;  // split path, default budget

  // Multi-Bernoulli: DFT evaluation against literal 3^M enumeration.
  std::mt19937_64 rng(911);
  Region box = make_box(pt(-1.2, -0.9), pt(1.1, 1.3));
  for (int M = 1; M <= 12; ++M) {
    MbComponents mb;
    for (int i = 0; i < M; ++i) {
      mb.r.push_back(std::uniform_real_distribution<double>(0.05, 0.95)(rng));
      mb.densities.push_back(
          testsupport::random_mixture(2, 1 + static_cast<int>(rng() % 2), rng, 1.5));
    }
    CardinalityPmf dft = mb_fov_pmf_dft(mb, box, icfg);
    CardinalityPmf direct = mb_fov_pmf_direct(mb, box, icfg);
    ACCEPT(dft.probs.size() == direct.probs.size(), "M=" << M << ": pmf sizes differ");
    double d = (dft.probs - direct.probs).lpNorm<Eigen::Infinity>();
    ACCEPT(d <= 1e-10, "M=" << M << ": dft vs direct " << d);
  }

  // Labeled hypotheses: library vs hypothesis-weighted subset enumeration.
  GlmbParams glmb;
  std::vector<int> sizes = {0, 3, 6};
  Eigen::Vector3d hw(0.2, 0.5, 0.3);
  int next_label = 0;
  for (int h = 0; h < 3; ++h) {
    GlmbHypothesis hyp;
    hyp.weight = hw(h);
    for (int i = 0; i < sizes[h]; ++i) {
      hyp.labels.push_back(next_label++);
      hyp.densities.push_back(
          testsupport::random_mixture(2, 1 + static_cast<int>(rng() % 2), rng, 1.3));
    }
    glmb.hypotheses.push_back(std::move(hyp));
  }
  CardinalityPmf gp = glmb_fov_pmf(glmb, box, icfg);
  Eigen::VectorXd oracle = Eigen::VectorXd::Zero(7);
  for (const auto& hyp : glmb.hypotheses) {
    std::vector<double> qs;
    for (const auto& d : hyp.densities)
      qs.push_back(inclusion_probability(d, box, icfg).value);
    Eigen::VectorXd part = testsupport::poisson_binomial_subsets(qs);
    for (int k = 0; k < part.size(); ++k) oracle(k) += hyp.weight * part(k);
  }
  ACCEPT(gp.probs.size() == 7, "labeled pmf size " << gp.probs.size());
  double gd = (gp.probs - oracle).lpNorm<Eigen::Infinity>();
  ACCEPT(gd <= 1e-10, "labeled pmf vs subset oracle " << gd);

  // Poisson: thinning leaves Poisson(mass inside), the mass shared with the
  // estimate under test so the check isolates the summation.
  GaussianMixture phd;
  phd.dim = 2;
  phd.position_dim = 2;
  {
    GaussianComponent a;
    a.weight = 1.2;
    a.mean = pt(-1.0, 0.0);
    a.cov = Eigen::Matrix2d::Identity();
    GaussianComponent b;
    b.weight = 2.0;
    b.mean = pt(2.0, 0.5);
    b.cov = 0.7 * Eigen::Matrix2d::Identity();
    phd.components = {a, b};
    phd.normalized = false;
  }
  Region pbox = make_box(pt(-2.0, -2.0), pt(2.5, 2.0));
  CardinalityPmf pois = poisson_fov_pmf(PoissonIntensity{phd}, pbox, icfg);
  double mu = phd.total_weight() * inclusion_probability(phd, pbox, icfg).value;
  for (int k = 0; k < pois.probs.size(); ++k) {
    double d = std::abs(pois.probs(k) - poisson_pmf(k, mu));
    ACCEPT(d <= 1e-9, "poisson pmf k=" << k << ": " << d);
  }

  // IID cluster with unit-rate Poisson cardinality: both paths refine the
  // identical mixture, so they must agree to summation accuracy.
  GaussianMixture spatial = single(pt(0.3, -0.4), 1.2 * Eigen::Matrix2d::Identity());
  Region disc = make_disc(pt(0.0, 0.0), 1.4);
  const int n_max = 60;
  Eigen::VectorXd rho(n_max + 1);
  for (int n = 0; n <= n_max; ++n) rho(n) = poisson_pmf(n, 1.0);
  rho /= rho.sum();
  CardinalityPmf iidc = iidc_fov_pmf(rho, spatial, disc, icfg);
  CardinalityPmf pref = poisson_fov_pmf(PoissonIntensity{spatial}, disc, icfg);
  int n = static_cast<int>(std::min(iidc.probs.size(), pref.probs.size()));
  for (int k = 0; k < n; ++k) {
    double d = std::abs(iidc.probs(k) - pref.probs(k));
    ACCEPT(d <= 1e-9, "iidc vs poisson k=" << k << ": " << d);
  }
}

// --- criterion 6: mixture filter against a bootstrap particle filter ------

void filter_vs_particles() {
  CvMatrices cv = cv_model(0.5, 0.05);
  MotionModel model;
  model.F = cv.F;
  model.Q = cv.Q;
  model.p_s = 0.98;
  model.p_b = 0.02;
  Eigen::VectorXd bm = Eigen::VectorXd::Zero(4);
  model.birth = single(bm, Eigen::Vector4d(9.0, 9.0, 0.5, 0.5).asDiagonal(), 2);

  BernoulliState state;
  state.r = 0.5;
  Eigen::VectorXd m0(4);
  m0 << 0.3, 0.2, 0.4, 0.0;
  state.spatial = single(m0, Eigen::Vector4d(1.0, 1.0, 0.25, 0.25).asDiagonal(), 2);

  DetectionModel det;
  det.fov = make_box(pt(-6.0, -6.0), pt(6.0, 6.0));
  det.pd_inside = 0.9;
  det.clutter_rate = 0.3;
  det.clutter_density = 1.0 / 144.0;

  testsupport::ParticleFilter pf(state, 100000, 4242);

  SplitConfig cfg;
  cfg.w_min = 0.01;
  cfg.R = 3;
  cfg.lambda = 0.001;
  std::vector<int> detected = {1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1};
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    state = predict(state, model);
    pf.predict(model);

    MeasurementSet meas;
    std::vector<Region> regions;
    if (detected[k]) {
      Region z = make_disc(pt(0.3 + 0.2 * k, 0.2), 0.9);
      meas.items.push_back({std::nullopt, z});
      regions.push_back(z);
    }
    UpdateResult out = update(state, meas, det, cfg, 150);
    pf.update(regions, det);
    state = out.state;

    double d = std::abs(state.r - pf.r);
    worst = std::max(worst, d);
    ACCEPT(d <= 0.05, "step " << k << ": |r_gm - r_pf| = " << d);
  }
  MixtureMoments mm = mixture_moments(state.spatial);
  double dm = (mm.mean.head(2) - pf.mean().head(2)).norm();
  ACCEPT(dm <= 0.5, "final position means differ by " << dm);
  std::printf("      worst per-step existence gap %.4f, final mean gap %.3f\n", worst, dm);
}

// --- criterion 7: anchor tracker dips on misses and recovers --------------

void airport_dip_and_recovery() {
  AirportConfig cfg = default_airport_config();
  cfg.seed = 39;
  TrackLog log = run_airport(cfg);
  ACCEPT(!log.truncated, "reference run left the ROI early");
  ACCEPT(static_cast<int>(log.steps.size()) == cfg.steps,
         "expected " << cfg.steps << " steps, got " << log.steps.size());

  // Steps 30..32 are three consecutive misdetections with the walker inside
  // the composite detector; step 33 detects again. The dip value is a
  // regression constant measured once from this seeded run.
  Region fov = cfg.anchors.composite_fov();
  for (int k = 30; k <= 32; ++k) {
    ACCEPT(!log.steps[k].detected, "step " << k << " unexpectedly detected");
    ACCEPT(contains(fov, log.steps[k].truth.head(2)), "walker outside detector at " << k);
  }
  ACCEPT(log.steps[33].detected, "step 33 should detect");

  double before = log.steps[29].r;
  ACCEPT(before >= 0.99, "pre-dip existence " << before);
  ACCEPT(log.steps[30].r < before, "no drop at step 30");
  ACCEPT(log.steps[31].r < log.steps[30].r, "no drop at step 31");
  ACCEPT(log.steps[32].r < log.steps[31].r, "no drop at step 32");

  const double kDip = 0.91461679454124689;  // measured once, seed 39
  double dip = log.steps[32].r;
  ACCEPT(std::abs(dip - kDip) <= 1e-6, "dip " << dip << " drifted from pinned " << kDip);
  ACCEPT(before - dip >= 0.05, "dip magnitude " << before - dip << " too shallow");
  ACCEPT(log.steps[33].r >= dip + 0.02,
         "no recovery: " << log.steps[33].r << " after dip " << dip);
  std::printf("      r: %.4f -> %.4f over three misses, %.4f after redetection\n", before, dip,
              log.steps[33].r);
}

// --- criterion 8: placement surface at scale plus direct sub-instance -----

void placement_surface() {
  PlacementConfig cfg = default_placement_config();  // 100 components, 0.05 lattice
  PlacementSurface surf = run_sensor_placement(cfg);
  ACCEPT(surf.xs.size() == 81 && surf.ys.size() == 81,
         "lattice " << surf.xs.size() << "x" << surf.ys.size());

  auto value_at = [](const PlacementSurface& s, const Eigen::MatrixXd& field,
                     const Eigen::Vector2d& c) {
    int i = -1, j = -1;
    for (int k = 0; k < s.xs.size(); ++k)
      if (std::abs(s.xs(k) - c.x()) <= 1e-12) i = k;
    for (int k = 0; k < s.ys.size(); ++k)
      if (std::abs(s.ys(k) - c.y()) <= 1e-12) j = k;
    ACCEPT(i >= 0 && j >= 0, "argmax off the lattice");
    return field(i, j);
  };
  ACCEPT(std::abs(surf.max_variance - value_at(surf, surf.variance, surf.argmax)) <= 1e-12,
         "max_variance inconsistent with the surface");

  // Boundary bisection, on the instance where it is provable: one tight
  // component. Centering the window swallows it (q = r, variance r(1-r)),
  // putting the boundary through the mean halves q and nearly maximizes
  // q(1-q), so the variance peak sits a half window off-center while the
  // expected count peaks at the center.
  PlacementConfig lone_cfg;
  lone_cfg.roi_lo = Eigen::Vector2d(-1.0, -1.0);
  lone_cfg.roi_hi = Eigen::Vector2d(1.0, 1.0);
  lone_cfg.spacing = 0.05;
  MbComponents lone;
  lone.r = {0.9};
  lone.densities = {single(pt(0.0, 0.0), 0.0225 * Eigen::Matrix2d::Identity())};
  lone_cfg.mb = lone;
  PlacementSurface ls = run_sensor_placement(lone_cfg);
  ACCEPT(ls.mass_argmax.lpNorm<Eigen::Infinity>() <= 0.15,
         "count peak not central: " << ls.mass_argmax.transpose());
  double off = ls.argmax.lpNorm<Eigen::Infinity>();
  ACCEPT(off >= 0.35 && off <= 0.65, "variance peak not near the bisecting offset: "
                                         << ls.argmax.transpose());
  double var_gap = ls.max_variance - value_at(ls, ls.variance, ls.mass_argmax);
  ACCEPT(var_gap >= 0.1, "bisection beats swallowing by only " << var_gap);
  double mass_gap =
      value_at(ls, ls.mass, ls.mass_argmax) - value_at(ls, ls.mass, ls.argmax);
  ACCEPT(mass_gap >= 0.2, "swallowing beats bisection on count by only " << mass_gap);

  // A 10-component sub-instance is small enough for literal enumeration.
  PlacementConfig sub = cfg;
  sub.roi_lo = Eigen::Vector2d(-1.0, -1.0);
  sub.roi_hi = Eigen::Vector2d(1.0, 1.0);
  sub.spacing = 0.25;
  MbComponents small;
  for (int i = 0; i < 10; ++i) {
    small.r.push_back(surf.mb.r[i]);
    small.densities.push_back(surf.mb.densities[i]);
  }
  sub.mb = small;
  PlacementSurface ssurf = run_sensor_placement(sub);
  InclusionConfig icfg;
  icfg.split = sub.split;
  Eigen::Vector2d half = 0.5 * sub.fov_size;
  double worst = 0.0;
  for (int i = 0; i < ssurf.xs.size(); ++i) {
    for (int j = 0; j < ssurf.ys.size(); ++j) {
      Eigen::Vector2d c(ssurf.xs(i), ssurf.ys(j));
      Region box = make_box((c - half).eval(), (c + half).eval());
      CardinalityPmf direct = mb_fov_pmf_direct(small, box, icfg);
      worst = std::max(worst, std::abs(direct.variance() - ssurf.variance(i, j)));
      worst = std::max(worst, std::abs(direct.mean() - ssurf.mass(i, j)));
    }
  }
  ACCEPT(worst <= 1e-9, "sub-instance surface vs direct enumeration: " << worst);
  std::printf(
      "      lone-component peaks: variance (%.2f, %.2f), count (%.2f, %.2f); direct gap %.2e\n",
      ls.argmax.x(), ls.argmax.y(), ls.mass_argmax.x(), ls.mass_argmax.y(), worst);
}

// --- criterion 9: negative updates empty the detector region --------------

void negative_information() {
  CvMatrices cv = cv_model(1.0, 0.005);
  MotionModel model;
  model.F = cv.F;
  model.Q = cv.Q;
  model.p_s = 0.99;
  model.p_b = 0.0;
  Eigen::VectorXd bm = Eigen::VectorXd::Zero(4);
  model.birth = single(bm, Eigen::Vector4d(9.0, 9.0, 1.0, 1.0).asDiagonal(), 2);

  BernoulliState state;
  state.r = 0.8;
  state.spatial = single(bm, Eigen::Vector4d(1.0, 1.0, 0.01, 0.01).asDiagonal(), 2);

  DetectionModel det;
  Eigen::VectorXd normal(2);
  normal << 1.0, 0.0;
  det.fov = make_halfspace(normal, 2.0);
  det.pd_inside = 1.0;
  det.clutter_rate = 0.0;

  SplitConfig cfg;
  cfg.w_min = 0.01;
  cfg.R = 3;
  cfg.lambda = 0.001;

  std::mt19937_64 rng(99);
  for (int k = 0; k < 3; ++k) {
    state = predict(state, model);
    UpdateResult out = update(state, MeasurementSet{}, det, cfg, 60);
    state = out.state;

    Eigen::MatrixXd samples = sample_mixture(state.spatial, 1000000, rng);
    int inside = 0;
    for (int i = 0; i < samples.cols(); ++i)
      if (contains(det.fov, samples.col(i).head(2))) ++inside;
    double mass = static_cast<double>(inside) / samples.cols();
    ACCEPT(mass <= 0.02, "step " << k << ": detector mass " << mass);
    std::printf("      step %d: posterior detector mass %.4f\n", k, mass);
  }
}

// --- criterion 10: analytic cost gradient against central differences -----

void gradient_check() {
  std::mt19937_64 rng(13);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    int R = 1 + static_cast<int>(rng() % 5);
    SplitParams p = random_split_point(R, rng);
    double lambda = std::uniform_real_distribution<double>(1e-4, 0.1)(rng);
    SplitGradient g = split_cost_gradient(p, lambda);

    auto check = [&](double analytic, double numeric, const char* what, int j) {
      double scale = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
      double rel = std::abs(analytic - numeric) / scale;
      ACCEPT(rel <= 1e-5, "trial " << trial << " " << what << "[" << j << "]: rel " << rel);
    };
    for (int j = 0; j < R; ++j) {
      SplitParams pp = p, pm = p;
      pp.weights(j) += h;
      pm.weights(j) -= h;
      check(g.d_weights(j), (split_cost(pp, lambda) - split_cost(pm, lambda)) / (2.0 * h),
            "weight", j);
      pp = p;
      pm = p;
      pp.means(j) += h;
      pm.means(j) -= h;
      check(g.d_means(j), (split_cost(pp, lambda) - split_cost(pm, lambda)) / (2.0 * h), "mean",
            j);
    }
    SplitParams pp = p, pm = p;
    pp.sigma += h;
    pm.sigma -= h;
    check(g.d_sigma, (split_cost(pp, lambda) - split_cost(pm, lambda)) / (2.0 * h), "sigma", 0);
  }
}

struct Criterion {
  const char* name;
  std::function<void()> run;
  double budget_s;  // 0 disables the runtime gate
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"univariate 4-way split matches the embedded table", split_table_reproduction, 10.0},
      {"refinement conserves weight and mean on 200 random cases", split_conservation, 0.0},
      {"half-plane partition mass within 0.02 of the normal CDF", halfplane_partition_mass, 0.0},
      {"multi-region refinement invariant to region order", multifov_order_invariance, 0.0},
      {"cardinality transforms match independent oracles", cardinality_oracles, 0.0},
      {"mixture filter tracks a 100k-particle reference within 0.05", filter_vs_particles, 0.0},
      {"anchor tracker dips over three misses and recovers", airport_dip_and_recovery, 60.0},
      {"placement surface at scale, sub-instance matches enumeration", placement_surface, 30.0},
      {"three negative updates hold detector mass below 0.02", negative_information, 0.0},
      {"split cost gradient matches central differences", gradient_check, 0.0},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.budget_s > 0.0 && dt > c.budget_s) {
      ok = false;
      std::ostringstream os;
      os << "runtime " << dt << " s exceeds budget " << c.budget_s << " s";
      detail = os.str();
    }
    std::printf("[%s] %02zu %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1, c.name, dt,
                detail.empty() ? "" : ": ", detail.c_str());
    if (!ok) ++failed;
  }
  if (failed == 0)
    std::printf("all %zu acceptance criteria hold\n", criteria.size());
  else
    std::printf("%d of %zu acceptance criteria failing\n", failed, criteria.size());
  return failed;
}
