// Command-line front end: split, cardinality, airport, place, splitlib gen.
// Exit codes: 0 on success, 2 on any configuration or input error.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fovsplit/json_io.hpp"

namespace {

using fovsplit::io::json;

json parse_file(const std::string& path) {
  return json::parse(fovsplit::io::read_file(path));
}

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    fovsplit::io::write_file(out_path, text);
}

struct SplitArgs {
  std::string gm_path, region_path, out_path;
  double w_min = 0.01, lambda = 0.001, zeta = 3.0;
  int R = 3, n_g = 7, max_depth = 10;
};

void run_split(const SplitArgs& a) {
  fovsplit::GaussianMixture gm = fovsplit::io::gm_from_json(parse_file(a.gm_path));
  fovsplit::Region region = fovsplit::io::region_from_json(parse_file(a.region_path));

  fovsplit::SplitConfig cfg;
  cfg.w_min = a.w_min;
  cfg.R = a.R;
  cfg.lambda = a.lambda;
  cfg.grid.zeta = a.zeta;
  cfg.grid.n_g = a.n_g;
  cfg.max_depth = a.max_depth;
  fovsplit::validate(cfg);

  fovsplit::SplitResult result = fovsplit::split_for_fov(gm, cfg, region);
  fovsplit::Partition parts = fovsplit::partition(result.gm, region);

  json j;
  j["refined"] = fovsplit::io::to_json(result.gm);
  j["inside"] = fovsplit::io::to_json(parts.inside);
  j["outside"] = fovsplit::io::to_json(parts.outside);
  j["mass_inside"] = parts.inside.total_weight();
  j["mass_outside"] = parts.outside.total_weight();
  j["depth_exhausted"] = result.depth_exhausted;
  emit(j, a.out_path);
}

struct CardinalityArgs {
  std::string model, input_path, region_path, method = "split", out_path;
  double w_min = 0.01, lambda = 0.001, zeta = 3.0, eps_tail = 1e-12;
  int R = 3, n_g = 7, max_depth = 10, mc_samples = 100000;
  std::uint64_t mc_seed = 1234;
};

void run_cardinality(const CardinalityArgs& a) {
  fovsplit::Region region = fovsplit::io::region_from_json(parse_file(a.region_path));
  json input = parse_file(a.input_path);

  fovsplit::InclusionConfig cfg;
  cfg.method = a.method == "mc" ? fovsplit::InclusionMethod::kMonteCarlo
                                : fovsplit::InclusionMethod::kSplit;
  cfg.split.w_min = a.w_min;
  cfg.split.R = a.R;
  cfg.split.lambda = a.lambda;
  cfg.split.grid.zeta = a.zeta;
  cfg.split.grid.n_g = a.n_g;
  cfg.split.max_depth = a.max_depth;
  fovsplit::validate(cfg.split);
  cfg.mc_samples = a.mc_samples;
  cfg.mc_seed = a.mc_seed;

  fovsplit::CardinalityPmf pmf;
  if (a.model == "poisson") {
    pmf = fovsplit::poisson_fov_pmf(fovsplit::io::poisson_from_json(input), region, cfg,
                                    a.eps_tail);
  } else if (a.model == "iidc") {
    if (!input.contains("rho") || !input["rho"].is_array())
      throw std::invalid_argument("iidc: missing 'rho' array");
    Eigen::VectorXd rho(input["rho"].size());
    for (size_t i = 0; i < input["rho"].size(); ++i)
      rho(static_cast<int>(i)) = input["rho"][i].get<double>();
    if (!input.contains("spatial")) throw std::invalid_argument("iidc: missing 'spatial'");
    fovsplit::GaussianMixture spatial = fovsplit::io::gm_from_json(input["spatial"]);
    pmf = fovsplit::iidc_fov_pmf(rho, spatial, region, cfg);
  } else if (a.model == "mb") {
    pmf = fovsplit::mb_fov_pmf_dft(fovsplit::io::mb_from_json(input), region, cfg);
  } else if (a.model == "glmb") {
    pmf = fovsplit::glmb_fov_pmf(fovsplit::io::glmb_from_json(input), region, cfg);
  } else {
    throw std::invalid_argument("cardinality: unknown model '" + a.model + "'");
  }

  json j;
  j["probs"] = json::array();
  for (int i = 0; i < pmf.probs.size(); ++i) j["probs"].push_back(pmf.probs(i));
  j["mean"] = pmf.mean();
  j["variance"] = pmf.variance();
  emit(j, a.out_path);
}

struct AirportArgs {
  std::string config_path, out_path, format = "json";
  std::optional<std::uint64_t> seed;
};

void run_airport_cmd(const AirportArgs& a) {
  fovsplit::AirportConfig cfg = a.config_path.empty()
                                    ? fovsplit::default_airport_config()
                                    : fovsplit::io::airport_config_from_json(parse_file(a.config_path));
  if (a.seed) cfg.seed = *a.seed;
  fovsplit::validate(cfg);

  fovsplit::TrackLog log = fovsplit::run_airport(cfg);
  fovsplit::export_tracklog(log, a.format, a.out_path);
  if (log.truncated)
    std::cerr << "note: truth left the region of interest; log truncated at step "
              << log.steps.size() << "\n";
  std::cout << "wrote " << log.steps.size() << " steps to " << a.out_path << "\n";
}

struct PlaceArgs {
  std::string config_path, out_path, format = "csv";
};

void run_place(const PlaceArgs& a) {
  fovsplit::PlacementConfig cfg =
      a.config_path.empty() ? fovsplit::default_placement_config()
                            : fovsplit::io::placement_config_from_json(parse_file(a.config_path));
  fovsplit::PlacementSurface surface = fovsplit::run_sensor_placement(cfg);
  fovsplit::export_surface(surface, a.format, a.out_path);
  std::cout << "max cardinality variance " << surface.max_variance << " at ("
            << surface.argmax.x() << ", " << surface.argmax.y() << "); wrote " << a.out_path
            << "\n";
}

struct SplitlibGenArgs {
  std::string in_path, out_path;
  double lambda = 0.001;
  int R = 3;
};

void run_splitlib_gen(const SplitlibGenArgs& a) {
  fovsplit::SplitLibrary lib;
  if (!a.in_path.empty()) fovsplit::io::library_merge_from_json(lib, parse_file(a.in_path));
  fovsplit::SplitParams params = lib.lookup(a.R, a.lambda);
  const double cost = fovsplit::split_cost(params, a.lambda);
  std::cerr << "entry " << fovsplit::SplitLibrary::key(a.R, a.lambda) << ": cost " << cost
            << "\n";
  emit(fovsplit::io::library_to_json(lib), a.out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field-of-view aware Gaussian mixture estimation tools"};
  app.require_subcommand(1);

  SplitArgs split_args;
  CLI::App* split = app.add_subcommand("split", "Refine a mixture against a region boundary");
  split->add_option("--gm", split_args.gm_path, "Input Gaussian mixture JSON")->required();
  split->add_option("--region", split_args.region_path, "Region JSON")->required();
  split->add_option("--wmin", split_args.w_min, "Pass-through weight threshold")
      ->capture_default_str();
  split->add_option("--R", split_args.R, "Components per elementary split")
      ->capture_default_str();
  split->add_option("--lambda", split_args.lambda, "Variance regularizer")->capture_default_str();
  split->add_option("--zeta", split_args.zeta, "Collocation half-width in sigmas")
      ->capture_default_str();
  split->add_option("--ng", split_args.n_g, "Collocation points per axis")->capture_default_str();
  split->add_option("--max-depth", split_args.max_depth, "Recursion depth cap")
      ->capture_default_str();
  split->add_option("--out", split_args.out_path, "Output JSON path (stdout if omitted)");
  split->callback([&split_args] { run_split(split_args); });

  CardinalityArgs card_args;
  CLI::App* card =
      app.add_subcommand("cardinality", "Field-of-view cardinality distribution of an RFS model");
  card->add_option("--model", card_args.model, "Model family")
      ->required()
      ->check(CLI::IsMember({"poisson", "iidc", "mb", "glmb"}));
  card->add_option("--input", card_args.input_path, "Model parameter JSON")->required();
  card->add_option("--region", card_args.region_path, "Region JSON")->required();
  card->add_option("--method", card_args.method, "Inclusion probability estimator")
      ->check(CLI::IsMember({"split", "mc"}))
      ->capture_default_str();
  card->add_option("--wmin", card_args.w_min, "Split pass-through threshold")
      ->capture_default_str();
  card->add_option("--R", card_args.R, "Components per elementary split")->capture_default_str();
  card->add_option("--lambda", card_args.lambda, "Variance regularizer")->capture_default_str();
  card->add_option("--zeta", card_args.zeta, "Collocation half-width in sigmas")
      ->capture_default_str();
  card->add_option("--ng", card_args.n_g, "Collocation points per axis")->capture_default_str();
  card->add_option("--max-depth", card_args.max_depth, "Recursion depth cap")
      ->capture_default_str();
  card->add_option("--mc-samples", card_args.mc_samples, "Monte Carlo sample count")
      ->capture_default_str();
  card->add_option("--mc-seed", card_args.mc_seed, "Monte Carlo seed")->capture_default_str();
  card->add_option("--eps-tail", card_args.eps_tail, "Poisson tail truncation budget")
      ->capture_default_str();
  card->add_option("--out", card_args.out_path, "Output JSON path (stdout if omitted)");
  card->callback([&card_args] { run_cardinality(card_args); });

  AirportArgs airport_args;
  CLI::App* airport =
      app.add_subcommand("airport", "Run the indoor tracking demo with anchor statements");
  airport->add_option("--config", airport_args.config_path,
                      "Scenario config JSON (built-in defaults if omitted)");
  airport->add_option("--seed", airport_args.seed, "Override the scenario seed");
  airport->add_option("--out", airport_args.out_path, "Output track log path")->required();
  airport->add_option("--format", airport_args.format, "Log format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  airport->callback([&airport_args] { run_airport_cmd(airport_args); });

  PlaceArgs place_args;
  CLI::App* place =
      app.add_subcommand("place", "Sweep a sensor footprint and map cardinality variance");
  place->add_option("--config", place_args.config_path,
                    "Placement config JSON (built-in defaults if omitted)");
  place->add_option("--out", place_args.out_path, "Output surface path")->required();
  place->add_option("--format", place_args.format, "Surface format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  place->callback([&place_args] { run_place(place_args); });

  CLI::App* splitlib = app.add_subcommand("splitlib", "Manage the standard-normal split library");
  splitlib->require_subcommand(1);
  SplitlibGenArgs gen_args;
  CLI::App* gen = splitlib->add_subcommand("gen", "Optimize and emit a library entry");
  gen->add_option("--R", gen_args.R, "Components per elementary split")->capture_default_str();
  gen->add_option("--lambda", gen_args.lambda, "Variance regularizer")->capture_default_str();
  gen->add_option("--in", gen_args.in_path, "Existing library JSON to merge first");
  gen->add_option("--out", gen_args.out_path, "Output library JSON path (stdout if omitted)");
  gen->callback([&gen_args] { run_splitlib_gen(gen_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
