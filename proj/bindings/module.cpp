#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fovsplit/json_io.hpp"

namespace py = pybind11;

namespace {

fovsplit::GaussianMixture gm_from_str(const std::string& text) {
  return fovsplit::io::gm_from_json(fovsplit::io::json::parse(text));
}

std::string gm_to_str(const fovsplit::GaussianMixture& gm) {
  return fovsplit::io::to_json(gm).dump();
}

fovsplit::Region region_from_str(const std::string& text) {
  return fovsplit::io::region_from_json(fovsplit::io::json::parse(text));
}

std::string region_to_str(const fovsplit::Region& r) { return fovsplit::io::to_json(r).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Field-of-view aware Gaussian mixture estimation core";

  py::class_<fovsplit::GaussianComponent>(m, "GaussianComponent")
      .def(py::init<>())
      .def(py::init([](double w, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
             fovsplit::GaussianComponent c;
             c.weight = w;
             c.mean = mean;
             c.cov = cov;
             return c;
           }),
           py::arg("weight"), py::arg("mean"), py::arg("cov"))
      .def_readwrite("weight", &fovsplit::GaussianComponent::weight)
      .def_readwrite("mean", &fovsplit::GaussianComponent::mean)
      .def_readwrite("cov", &fovsplit::GaussianComponent::cov);

  py::class_<fovsplit::GaussianMixture>(m, "GaussianMixture")
      .def(py::init<>())
      .def_readwrite("components", &fovsplit::GaussianMixture::components)
      .def_readwrite("dim", &fovsplit::GaussianMixture::dim)
      .def_readwrite("position_dim", &fovsplit::GaussianMixture::position_dim)
      .def_readwrite("normalized", &fovsplit::GaussianMixture::normalized)
      .def("size", &fovsplit::GaussianMixture::size)
      .def("total_weight", &fovsplit::GaussianMixture::total_weight)
      .def("pdf", &fovsplit::GaussianMixture::pdf, py::arg("x"));

  m.def("validate_mixture",
        [](const fovsplit::GaussianMixture& gm) { fovsplit::validate(gm); });
  m.def("reduce", &fovsplit::reduce, py::arg("gm"), py::arg("max_components"));
  m.def("position_marginal",
        py::overload_cast<const fovsplit::GaussianMixture&>(&fovsplit::position_marginal),
        py::arg("gm"));
  m.def("gm_from_json", &gm_from_str, py::arg("text"));
  m.def("gm_to_json", &gm_to_str, py::arg("gm"));

  py::class_<fovsplit::Region>(m, "Region")
      .def("dim", &fovsplit::Region::dim)
      .def("to_json", &region_to_str);
  m.def("make_box", &fovsplit::make_box, py::arg("lo"), py::arg("hi"));
  m.def("make_disc", &fovsplit::make_disc, py::arg("center"), py::arg("radius"));
  m.def("make_polygon", &fovsplit::make_polygon, py::arg("vertices"));
  m.def("make_halfspace", &fovsplit::make_halfspace, py::arg("normal"), py::arg("offset"));
  m.def("make_union", &fovsplit::make_union, py::arg("regions"));
  m.def("make_intersection", &fovsplit::make_intersection, py::arg("regions"));
  m.def("make_complement", &fovsplit::make_complement, py::arg("region"));
  m.def("contains", &fovsplit::contains, py::arg("region"), py::arg("point"));
  m.def("region_from_json", &region_from_str, py::arg("text"));

  py::class_<fovsplit::SplitConfig>(m, "SplitConfig")
      .def(py::init<>())
      .def_readwrite("w_min", &fovsplit::SplitConfig::w_min)
      .def_readwrite("R", &fovsplit::SplitConfig::R)
      .def_readwrite("lam", &fovsplit::SplitConfig::lambda)
      .def_readwrite("max_depth", &fovsplit::SplitConfig::max_depth)
      .def_property(
          "zeta", [](const fovsplit::SplitConfig& c) { return c.grid.zeta; },
          [](fovsplit::SplitConfig& c, double z) { c.grid.zeta = z; })
      .def_property(
          "n_g", [](const fovsplit::SplitConfig& c) { return c.grid.n_g; },
          [](fovsplit::SplitConfig& c, int n) { c.grid.n_g = n; });

  py::class_<fovsplit::SplitResult>(m, "SplitResult")
      .def_readonly("gm", &fovsplit::SplitResult::gm)
      .def_readonly("depth_exhausted", &fovsplit::SplitResult::depth_exhausted);
  py::class_<fovsplit::Partition>(m, "Partition")
      .def_readonly("inside", &fovsplit::Partition::inside)
      .def_readonly("outside", &fovsplit::Partition::outside);

  m.def("split_for_fov", &fovsplit::split_for_fov, py::arg("gm"), py::arg("config"),
        py::arg("region"));
  m.def("split_for_multifov", &fovsplit::split_for_multifov, py::arg("gm"), py::arg("config"),
        py::arg("regions"));
  m.def("partition", &fovsplit::partition, py::arg("gm"), py::arg("region"));

  py::class_<fovsplit::SplitParams>(m, "SplitParams")
      .def_readonly("weights", &fovsplit::SplitParams::weights)
      .def_readonly("means", &fovsplit::SplitParams::means)
      .def_readonly("sigma", &fovsplit::SplitParams::sigma);
  py::class_<fovsplit::OptimizeResult>(m, "OptimizeResult")
      .def_readonly("params", &fovsplit::OptimizeResult::params)
      .def_readonly("cost", &fovsplit::OptimizeResult::cost)
      .def_readonly("grad_norm", &fovsplit::OptimizeResult::grad_norm);
  m.def("split_cost", &fovsplit::split_cost, py::arg("params"), py::arg("lam"));
  m.def("optimize_split", &fovsplit::optimize_split, py::arg("R"), py::arg("lam"));
  m.def("library_lookup", [](int R, double lambda) {
    return fovsplit::default_split_library().lookup(R, lambda);
  });

  py::enum_<fovsplit::InclusionMethod>(m, "InclusionMethod")
      .value("SPLIT", fovsplit::InclusionMethod::kSplit)
      .value("MONTE_CARLO", fovsplit::InclusionMethod::kMonteCarlo);
  py::class_<fovsplit::InclusionConfig>(m, "InclusionConfig")
      .def(py::init<>())
      .def_readwrite("method", &fovsplit::InclusionConfig::method)
      .def_readwrite("split", &fovsplit::InclusionConfig::split)
      .def_readwrite("mc_samples", &fovsplit::InclusionConfig::mc_samples)
      .def_readwrite("mc_seed", &fovsplit::InclusionConfig::mc_seed);
  py::class_<fovsplit::CardinalityPmf>(m, "CardinalityPmf")
      .def_readonly("probs", &fovsplit::CardinalityPmf::probs)
      .def("mean", &fovsplit::CardinalityPmf::mean)
      .def("variance", &fovsplit::CardinalityPmf::variance);

  py::class_<fovsplit::PoissonIntensity>(m, "PoissonIntensity")
      .def(py::init<>())
      .def_readwrite("phd", &fovsplit::PoissonIntensity::phd);
  py::class_<fovsplit::MbComponents>(m, "MbComponents")
      .def(py::init<>())
      .def_readwrite("r", &fovsplit::MbComponents::r)
      .def_readwrite("densities", &fovsplit::MbComponents::densities);
  py::class_<fovsplit::GlmbHypothesis>(m, "GlmbHypothesis")
      .def(py::init<>())
      .def_readwrite("weight", &fovsplit::GlmbHypothesis::weight)
      .def_readwrite("labels", &fovsplit::GlmbHypothesis::labels)
      .def_readwrite("densities", &fovsplit::GlmbHypothesis::densities);
  py::class_<fovsplit::GlmbParams>(m, "GlmbParams")
      .def(py::init<>())
      .def_readwrite("hypotheses", &fovsplit::GlmbParams::hypotheses);

  m.def("inclusion_probability", &fovsplit::inclusion_probability, py::arg("density"),
        py::arg("region"), py::arg("config"));
  py::class_<fovsplit::InclusionEstimate>(m, "InclusionEstimate")
      .def_readonly("value", &fovsplit::InclusionEstimate::value)
      .def_readonly("std_error", &fovsplit::InclusionEstimate::std_error);
  m.def("poisson_fov_pmf", &fovsplit::poisson_fov_pmf, py::arg("intensity"), py::arg("region"),
        py::arg("config"), py::arg("eps_tail") = 1e-12);
  m.def("iidc_fov_pmf", &fovsplit::iidc_fov_pmf, py::arg("rho"), py::arg("spatial"),
        py::arg("region"), py::arg("config"));
  m.def("mb_fov_pmf_direct", &fovsplit::mb_fov_pmf_direct, py::arg("mb"), py::arg("region"),
        py::arg("config"));
  m.def("mb_fov_pmf_dft", &fovsplit::mb_fov_pmf_dft, py::arg("mb"), py::arg("region"),
        py::arg("config"));
  m.def("glmb_fov_pmf", &fovsplit::glmb_fov_pmf, py::arg("glmb"), py::arg("region"),
        py::arg("config"));

  py::class_<fovsplit::BernoulliState>(m, "BernoulliState")
      .def(py::init<>())
      .def_readwrite("r", &fovsplit::BernoulliState::r)
      .def_readwrite("spatial", &fovsplit::BernoulliState::spatial)
      .def_readonly("degenerate_prediction", &fovsplit::BernoulliState::degenerate_prediction);
  py::class_<fovsplit::MotionModel>(m, "MotionModel")
      .def(py::init<>())
      .def_readwrite("F", &fovsplit::MotionModel::F)
      .def_readwrite("Q", &fovsplit::MotionModel::Q)
      .def_readwrite("p_s", &fovsplit::MotionModel::p_s)
      .def_readwrite("p_b", &fovsplit::MotionModel::p_b)
      .def_readwrite("birth", &fovsplit::MotionModel::birth);
  py::class_<fovsplit::DetectionModel>(m, "DetectionModel")
      .def(py::init([](const fovsplit::Region& fov, double pd, double rate, double density) {
             fovsplit::DetectionModel d{fov, pd, rate, density};
             return d;
           }),
           py::arg("fov"), py::arg("pd_inside") = 0.9, py::arg("clutter_rate") = 0.25,
           py::arg("clutter_density") = 1.0)
      .def_readwrite("fov", &fovsplit::DetectionModel::fov)
      .def_readwrite("pd_inside", &fovsplit::DetectionModel::pd_inside)
      .def_readwrite("clutter_rate", &fovsplit::DetectionModel::clutter_rate)
      .def_readwrite("clutter_density", &fovsplit::DetectionModel::clutter_density);
  py::class_<fovsplit::ImpreciseMeasurement>(m, "ImpreciseMeasurement")
      .def(py::init<>())
      .def_readwrite("anchor", &fovsplit::ImpreciseMeasurement::anchor)
      .def_readwrite("region", &fovsplit::ImpreciseMeasurement::region);
  py::class_<fovsplit::MeasurementSet>(m, "MeasurementSet")
      .def(py::init<>())
      .def_readwrite("items", &fovsplit::MeasurementSet::items);
  py::class_<fovsplit::UpdateResult>(m, "UpdateResult")
      .def_readonly("state", &fovsplit::UpdateResult::state)
      .def_readonly("delta", &fovsplit::UpdateResult::delta);

  m.def("predict", &fovsplit::predict, py::arg("state"), py::arg("model"));
  m.def("update", &fovsplit::update, py::arg("state"), py::arg("measurements"),
        py::arg("detection"), py::arg("config"), py::arg("max_components") = 100);

  py::class_<fovsplit::TrackStep>(m, "TrackStep")
      .def_readonly("k", &fovsplit::TrackStep::k)
      .def_readonly("r", &fovsplit::TrackStep::r)
      .def_readonly("delta", &fovsplit::TrackStep::delta)
      .def_readonly("truth", &fovsplit::TrackStep::truth)
      .def_readonly("estimate", &fovsplit::TrackStep::estimate)
      .def_readonly("rss_pos", &fovsplit::TrackStep::rss_pos)
      .def_readonly("rss_vel", &fovsplit::TrackStep::rss_vel)
      .def_readonly("n_components", &fovsplit::TrackStep::n_components)
      .def_readonly("statements", &fovsplit::TrackStep::statements)
      .def_readonly("detected", &fovsplit::TrackStep::detected)
      .def_readonly("posterior", &fovsplit::TrackStep::posterior);
  py::class_<fovsplit::TrackLog>(m, "TrackLog")
      .def_readonly("steps", &fovsplit::TrackLog::steps)
      .def_readonly("truncated", &fovsplit::TrackLog::truncated);
  py::class_<fovsplit::PlacementSurface>(m, "PlacementSurface")
      .def_readonly("xs", &fovsplit::PlacementSurface::xs)
      .def_readonly("ys", &fovsplit::PlacementSurface::ys)
      .def_readonly("variance", &fovsplit::PlacementSurface::variance)
      .def_readonly("mass", &fovsplit::PlacementSurface::mass)
      .def_readonly("argmax", &fovsplit::PlacementSurface::argmax)
      .def_readonly("max_variance", &fovsplit::PlacementSurface::max_variance)
      .def_readonly("mass_argmax", &fovsplit::PlacementSurface::mass_argmax);

  m.def(
      "run_airport",
      [](const std::string& config_json) {
        fovsplit::AirportConfig cfg =
            config_json.empty()
                ? fovsplit::default_airport_config()
                : fovsplit::io::airport_config_from_json(fovsplit::io::json::parse(config_json));
        return fovsplit::run_airport(cfg);
      },
      py::arg("config_json") = std::string(),
      "Run the tracking demo; config_json overrides the built-in defaults field by field");
  m.def(
      "run_sensor_placement",
      [](const std::string& config_json) {
        fovsplit::PlacementConfig cfg =
            config_json.empty()
                ? fovsplit::default_placement_config()
                : fovsplit::io::placement_config_from_json(fovsplit::io::json::parse(config_json));
        return fovsplit::run_sensor_placement(cfg);
      },
      py::arg("config_json") = std::string(),
      "Sweep the sensor footprint; config_json overrides the built-in defaults field by field");
}
