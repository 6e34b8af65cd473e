#include "afm/commands.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "afm/artifacts.hpp"
#include "afm/csv.hpp"
#include "afm/errors.hpp"
#include "afm/estimator.hpp"
#include "afm/mc.hpp"
#include "afm/metrics.hpp"
#include "afm/normal.hpp"
#include "afm/simulate.hpp"

namespace afm {

using nlohmann::json;

namespace {

std::string joined(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir);
}

}  // namespace

void run_simulate(const json& config, const std::string& out_dir) {
  DGPSpec spec;
  try {
    spec = dgp_spec_from_json(config);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("simulate config: ") + e.what());
  }
  ensure_dir(out_dir);
  const GroundTruth truth = gen_panel(spec);

  const std::string panel_path = joined(out_dir, "panel.csv");
  const std::string factors_path = joined(out_dir, "factors_true.csv");
  const std::string functions_path = joined(out_dir, "functions_true.json");
  write_panel_csv(panel_path, truth.panel);
  write_factors_csv(factors_path, truth.factors);
  write_functions_json(functions_path, truth.functions, spec.n_series, spec.n_factors);
  std::vector<std::string> files = {panel_path, factors_path, functions_path};
  if (spec.factor_source == FactorSource::ar1_copula) {
    const std::string latent_path = joined(out_dir, "latent_z_true.csv");
    write_factors_csv(latent_path, truth.latent_z);
    files.push_back(latent_path);
  }
  write_manifest_json(joined(out_dir, "manifest.json"), "simulate",
                      dgp_spec_to_json(spec), files);
}

void run_fit(const json& config, const std::string& out_dir) {
  if (!config.contains("panel")) throw ConfigError("fit config: missing 'panel' path");
  const Panel panel = read_panel_csv(config["panel"].get<std::string>());
  EstimatorConfig est;
  try {
    est = estimator_config_from_json(config);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fit config: ") + e.what());
  }
  ensure_dir(out_dir);
  auto [model, report] = fit(panel, est);

  const std::string factors_path = joined(out_dir, "factors_est.csv");
  const std::string coeffs_path = joined(out_dir, "coeffs.csv");
  const std::string grid_path = joined(out_dir, "ghat_grid.csv");
  const std::string report_path = joined(out_dir, "fit_report.json");
  write_factors_csv(factors_path, model.factors.values);
  write_coeffs_csv(coeffs_path, model.coeffs, panel.series_ids);
  write_ghat_grid_csv(grid_path, model, panel.series_ids);
  write_fit_report_json(report_path, model, report);
  write_manifest_json(joined(out_dir, "manifest.json"), "fit", config,
                      {factors_path, coeffs_path, grid_path, report_path});
}

json run_eval(const json& config, const std::string& out_dir) {
  for (const char* key : {"factors_est", "factors_true", "coeffs", "functions_true"}) {
    if (!config.contains(key)) {
      throw ConfigError(std::string("eval config: missing '") + key + "' path");
    }
  }
  const Eigen::MatrixXd est = read_factors_csv(config["factors_est"].get<std::string>());
  const Eigen::MatrixXd truth = read_factors_csv(config["factors_true"].get<std::string>());
  const CoefficientTensor coeffs = read_coeffs_csv(config["coeffs"].get<std::string>());
  int n_series = 0, n_factors = 0;
  const std::vector<FunctionDescriptor> functions =
      read_functions_json(config["functions_true"].get<std::string>(), &n_series, &n_factors);

  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw DataError("eval: estimated and true factor files disagree on T or q");
  }
  if (coeffs.n_series() != n_series || coeffs.n_factors() != n_factors ||
      est.cols() != n_factors) {
    throw DataError("eval: coefficient and function files disagree on N or q");
  }

  if (!est.allFinite() || est.minCoeff() < 0.0 || est.maxCoeff() > 1.0) {
    throw DataError("eval: estimated factors must lie in [0,1]");
  }
  const Alignment alignment = align(est, truth);
  const FactorMatrix est_factors{est};
  const BasisSpec basis = make_basis(coeffs.dim());
  json out;
  out["mse_f"] = mse_f(est_factors, truth, alignment);
  out["mse_g"] = mse_g(basis, coeffs, functions, truth, alignment);
  out["alignment"] = json::object();
  json perm = json::array(), refl = json::array();
  for (std::size_t l = 0; l < alignment.permutation.size(); ++l) {
    perm.push_back(alignment.permutation[l] + 1);
    refl.push_back(static_cast<bool>(alignment.reflect[l]));
  }
  out["alignment"]["permutation"] = perm;
  out["alignment"]["reflect"] = refl;
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text_file(joined(out_dir, "eval.json"), out.dump(2) + "\n");
  }
  return out;
}

void run_mc_cmd(const json& config, const std::string& out_dir) {
  McConfig mc;
  try {
    mc.Ns = config.at("Ns").get<std::vector<int>>();
    mc.Ts = config.at("Ts").get<std::vector<int>>();
    mc.qs = config.value("qs", std::vector<int>{1});
    mc.replications = config.at("R").get<int>();
    mc.seed = config.value("seed", 0);
    mc.workers = config.value("workers", 1);
    json dgp = config.value("dgp", json::object());
    // N, T, q come from the grid; placeholders satisfy DGPSpec validation.
    dgp["N"] = 10;
    dgp["T"] = 10;
    dgp["q"] = 1;
    mc.dgp = dgp_spec_from_json(dgp);
    mc.estimator = estimator_config_from_json(config.value("estimator", json::object()));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mc config: ") + e.what());
  }
  ensure_dir(out_dir);
  const McResult result = run_mc(mc);
  write_text_file(joined(out_dir, "table.csv"), mc_table_csv(result, mc.Ts));
  write_text_file(joined(out_dir, "raw.csv"), mc_raw_csv(result));
  json manifest_config = config;
  manifest_config["workers"] = mc.workers;
  write_manifest_json(joined(out_dir, "manifest.json"), "mc", manifest_config,
                      {joined(out_dir, "table.csv"), joined(out_dir, "raw.csv")});
}

json run_transform(const json& config, const std::string& out_dir) {
  if (!config.contains("factors")) {
    throw ConfigError("transform config: missing 'factors' path");
  }
  const std::string target = config.value("target", "gaussian");
  const Eigen::MatrixXd factors = read_factors_csv(config["factors"].get<std::string>());
  ensure_dir(out_dir);
  json out;
  if (target == "gaussian") {
    const DistributionMap map = gaussian_map();
    const Eigen::MatrixXd z = retarget_factors(factors, map.quantile);
    write_factors_csv(joined(out_dir, "z.csv"), z);
    json thetas = json::array();
    for (Eigen::Index l = 0; l < z.cols(); ++l) {
      thetas.push_back(ar1_ols(z.col(l)));
    }
    out["theta_hat"] = thetas;
    write_text_file(joined(out_dir, "theta.json"), out.dump(2) + "\n");
    write_manifest_json(joined(out_dir, "manifest.json"), "transform", config,
                        {joined(out_dir, "z.csv"), joined(out_dir, "theta.json")});
    return out;
  }
  if (target.rfind("ecdf:", 0) == 0) {
    const std::string ref_path = target.substr(5);
    const Eigen::VectorXd reference = read_series_csv(ref_path);
    if (reference.size() < 2) {
      throw DataError(ref_path + ": reference needs at least 2 observations");
    }
    const DistributionMap map = ecdf_map(reference);
    const Eigen::MatrixXd retargeted = retarget_factors(factors, map.quantile);
    write_factors_csv(joined(out_dir, "factors_retargeted.csv"), retargeted);
    write_manifest_json(joined(out_dir, "manifest.json"), "transform", config,
                        {joined(out_dir, "factors_retargeted.csv")});
    out["retargeted"] = "factors_retargeted.csv";
    return out;
  }
  throw ConfigError("transform config: target must be 'gaussian' or 'ecdf:<file>'");
}

}  // namespace afm
