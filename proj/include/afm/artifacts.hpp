#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "afm/estimator.hpp"
#include "afm/model.hpp"
#include "afm/simulate.hpp"

namespace afm {

// File schemas shared by the CLI and the tests.
//
//   panel.csv         header "series_id,t1,...,tT", one row per series
//   factors*.csv      header "t,f1,...,fq", T rows
//   coeffs.csv        header "series_id,factor,c1,...,cd", one row per (i,l)
//   ghat_grid.csv     header "series_id,factor,x,g", N*q*201 rows
//   functions_true.json / fit_report.json / manifest.json

void write_panel_csv(const std::string& path, const Panel& panel);
Panel read_panel_csv(const std::string& path);

void write_factors_csv(const std::string& path, const Eigen::MatrixXd& factors);
Eigen::MatrixXd read_factors_csv(const std::string& path);

void write_coeffs_csv(const std::string& path, const CoefficientTensor& coeffs,
                      const std::vector<std::string>& series_ids);
CoefficientTensor read_coeffs_csv(const std::string& path);

void write_ghat_grid_csv(const std::string& path, const FittedModel& model,
                         const std::vector<std::string>& series_ids,
                         int grid_points = 201);

void write_functions_json(const std::string& path,
                          const std::vector<FunctionDescriptor>& functions, int n_series,
                          int n_factors);
std::vector<FunctionDescriptor> read_functions_json(const std::string& path,
                                                    int* n_series = nullptr,
                                                    int* n_factors = nullptr);

// Single-column series file (header "value"), used as ecdf reference.
void write_series_csv(const std::string& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_series_csv(const std::string& path);

void write_fit_report_json(const std::string& path, const FittedModel& model,
                           const FitReport& report);

// manifest.json: tool version, command, resolved config, FNV-1a checksums of
// the files written alongside it.
void write_manifest_json(const std::string& path, const std::string& command,
                         const nlohmann::json& config,
                         const std::vector<std::string>& files);

std::uint64_t fnv1a64_file(const std::string& path);

nlohmann::json estimator_config_to_json(const EstimatorConfig& config);
EstimatorConfig estimator_config_from_json(const nlohmann::json& j);
nlohmann::json dgp_spec_to_json(const DGPSpec& spec);
DGPSpec dgp_spec_from_json(const nlohmann::json& j);

}  // namespace afm
