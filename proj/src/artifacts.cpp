#include "afm/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "afm/csv.hpp"
#include "afm/errors.hpp"
#include "afm/rng.hpp"
#include "afm/version.hpp"

namespace afm {

using nlohmann::json;

void write_panel_csv(const std::string& path, const Panel& panel) {
  std::ostringstream out;
  out << "series_id";
  for (int t = 0; t < panel.n_time(); ++t) {
    out << ",t" << (panel.time_ids.empty() ? std::to_string(t + 1) : panel.time_ids[t]);
  }
  out << "\n";
  for (int i = 0; i < panel.n_series(); ++i) {
    out << (panel.series_ids.empty() ? std::to_string(i + 1) : panel.series_ids[i]);
    for (int t = 0; t < panel.n_time(); ++t) {
      out << ',' << format_double(panel.values(i, t));
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

Panel read_panel_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header[0] != "series_id") {
    throw DataError(path + ": expected header series_id,t1,...,tT");
  }
  const int T = static_cast<int>(table.header.size()) - 1;
  const int N = static_cast<int>(table.rows.size());
  if (N < 1) throw DataError(path + ": no data rows");
  Panel panel;
  panel.values.resize(N, T);
  panel.series_ids.reserve(N);
  for (int i = 0; i < N; ++i) {
    panel.series_ids.push_back(table.rows[i][0]);
    for (int t = 0; t < T; ++t) {
      panel.values(i, t) = parse_cell(table.rows[i][t + 1], path, i + 2, t + 2);
    }
  }
  panel.time_ids.reserve(T);
  for (int t = 0; t < T; ++t) {
    std::string id = table.header[t + 1];
    if (!id.empty() && id[0] == 't') id.erase(0, 1);
    panel.time_ids.push_back(id);
  }
  validate(panel);
  return panel;
}

void write_factors_csv(const std::string& path, const Eigen::MatrixXd& factors) {
  std::ostringstream out;
  out << "t";
  for (int l = 0; l < factors.cols(); ++l) out << ",f" << (l + 1);
  out << "\n";
  for (int t = 0; t < factors.rows(); ++t) {
    out << (t + 1);
    for (int l = 0; l < factors.cols(); ++l) out << ',' << format_double(factors(t, l));
    out << "\n";
  }
  write_text_file(path, out.str());
}

Eigen::MatrixXd read_factors_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.header[0] != "t") {
    throw DataError(path + ": expected header t,f1,...,fq");
  }
  const int q = static_cast<int>(table.header.size()) - 1;
  const int T = static_cast<int>(table.rows.size());
  if (T < 2) throw DataError(path + ": need at least 2 rows");
  Eigen::MatrixXd factors(T, q);
  for (int t = 0; t < T; ++t) {
    for (int l = 0; l < q; ++l) {
      factors(t, l) = parse_cell(table.rows[t][l + 1], path, t + 2, l + 2);
    }
  }
  return factors;
}

void write_coeffs_csv(const std::string& path, const CoefficientTensor& coeffs,
                      const std::vector<std::string>& series_ids) {
  std::ostringstream out;
  out << "series_id,factor";
  for (int k = 0; k < coeffs.dim(); ++k) out << ",c" << (k + 1);
  out << "\n";
  for (int i = 0; i < coeffs.n_series(); ++i) {
    for (int l = 0; l < coeffs.n_factors(); ++l) {
      out << (series_ids.empty() ? std::to_string(i + 1) : series_ids[i]) << ','
          << (l + 1);
      for (int k = 0; k < coeffs.dim(); ++k) {
        out << ',' << format_double(coeffs.slice(i, l)[k]);
      }
      out << "\n";
    }
  }
  write_text_file(path, out.str());
}

CoefficientTensor read_coeffs_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header[0] != "series_id" ||
      table.header[1] != "factor") {
    throw DataError(path + ": expected header series_id,factor,c1,...,cd");
  }
  const int d = static_cast<int>(table.header.size()) - 2;
  int q = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int l = static_cast<int>(parse_cell(table.rows[r][1], path, r + 2, 2));
    q = std::max(q, l);
  }
  if (q < 1 || table.rows.size() % q != 0) {
    throw DataError(path + ": rows do not form N x q coefficient slices");
  }
  const int N = static_cast<int>(table.rows.size()) / q;
  CoefficientTensor coeffs(N, q, d);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int i = static_cast<int>(r) / q;
    const int l = static_cast<int>(parse_cell(table.rows[r][1], path, r + 2, 2)) - 1;
    if (l != static_cast<int>(r) % q) {
      throw DataError(path + ": rows must cycle factor 1..q within each series");
    }
    for (int k = 0; k < d; ++k) {
      coeffs.slice(i, l)[k] = parse_cell(table.rows[r][k + 2], path, r + 2, k + 3);
    }
  }
  return coeffs;
}

void write_ghat_grid_csv(const std::string& path, const FittedModel& model,
                         const std::vector<std::string>& series_ids, int grid_points) {
  std::ostringstream out;
  out << "series_id,factor,x,g\n";
  for (int i = 0; i < model.n_series(); ++i) {
    for (int l = 0; l < model.n_factors(); ++l) {
      for (int p = 0; p < grid_points; ++p) {
        const double x = static_cast<double>(p) / (grid_points - 1);
        out << (series_ids.empty() ? std::to_string(i + 1) : series_ids[i]) << ','
            << (l + 1) << ',' << format_double(x) << ','
            << format_double(model.eval_g(i, l, x)) << "\n";
      }
    }
  }
  write_text_file(path, out.str());
}

namespace {

json descriptor_to_json(const FunctionDescriptor& f) {
  if (f.kind == FunctionDescriptor::Kind::suite) {
    return json{{"kind", "suite"}, {"index", f.suite_index}};
  }
  return json{{"kind", "fourier"},
              {"a", f.fourier.a},
              {"b", f.fourier.b}};
}

FunctionDescriptor descriptor_from_json(const json& j) {
  FunctionDescriptor f;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "suite") {
    f.kind = FunctionDescriptor::Kind::suite;
    f.suite_index = j.at("index").get<int>();
  } else if (kind == "fourier") {
    f.kind = FunctionDescriptor::Kind::fourier;
    const auto a = j.at("a").get<std::vector<double>>();
    const auto b = j.at("b").get<std::vector<double>>();
    if (a.size() != 5 || b.size() != 5) {
      throw DataError("functions json: fourier loadings need 5 + 5 coefficients");
    }
    for (int m = 0; m < 5; ++m) {
      f.fourier.a[m] = a[m];
      f.fourier.b[m] = b[m];
    }
  } else {
    throw DataError("functions json: unknown kind '" + kind + "'");
  }
  return f;
}

}  // namespace

void write_functions_json(const std::string& path,
                          const std::vector<FunctionDescriptor>& functions, int n_series,
                          int n_factors) {
  json j;
  j["N"] = n_series;
  j["q"] = n_factors;
  j["functions"] = json::array();
  for (const FunctionDescriptor& f : functions) j["functions"].push_back(descriptor_to_json(f));
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<FunctionDescriptor> read_functions_json(const std::string& path,
                                                    int* n_series, int* n_factors) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  const int N = j.at("N").get<int>();
  const int q = j.at("q").get<int>();
  const auto& arr = j.at("functions");
  if (static_cast<int>(arr.size()) != N * q) {
    throw DataError(path + ": expected N*q function descriptors");
  }
  std::vector<FunctionDescriptor> out;
  out.reserve(arr.size());
  for (const auto& item : arr) out.push_back(descriptor_from_json(item));
  if (n_series) *n_series = N;
  if (n_factors) *n_factors = q;
  return out;
}

void write_series_csv(const std::string& path, const Eigen::VectorXd& values) {
  std::ostringstream out;
  out << "value\n";
  for (Eigen::Index t = 0; t < values.size(); ++t) {
    out << format_double(values[t]) << "\n";
  }
  write_text_file(path, out.str());
}

Eigen::VectorXd read_series_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 1 || table.header[0] != "value") {
    throw DataError(path + ": expected single-column header 'value'");
  }
  Eigen::VectorXd values(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    values[static_cast<Eigen::Index>(r)] = parse_cell(table.rows[r][0], path, r + 2, 1);
  }
  return values;
}

void write_fit_report_json(const std::string& path, const FittedModel& model,
                           const FitReport& report) {
  json j;
  j["final_loss"] = report.final_loss;
  j["iterations"] = report.n_iterations;
  j["start_index"] = report.start_index;
  j["converged"] = model.converged;
  j["config"] = estimator_config_to_json(model.config);
  json trace = json::array();
  for (const auto& [iter, value] : model.loss_trace) {
    trace.push_back(json{{"iteration", iter}, {"loss", value}});
  }
  j["loss_trace"] = trace;
  write_text_file(path, j.dump(2) + "\n");
}

void write_manifest_json(const std::string& path, const std::string& command,
                         const json& config, const std::vector<std::string>& files) {
  json j;
  j["tool"] = "afm";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config;
  json checksums = json::object();
  for (const std::string& file : files) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(file)));
    const std::size_t cut = file.find_last_of('/');
    checksums[cut == std::string::npos ? file : file.substr(cut + 1)] =
        std::string("fnv1a64:") + buf;
  }
  j["checksums"] = checksums;
  write_text_file(path, j.dump(2) + "\n");
}

std::uint64_t fnv1a64_file(const std::string& path) {
  return fnv1a64(read_text_file(path));
}

json estimator_config_to_json(const EstimatorConfig& c) {
  return json{{"q", c.q},
              {"d", c.d == 0 ? json("auto") : json(c.d)},
              {"eta", c.eta},
              {"max_iter", c.max_iter},
              {"rel_tol", c.rel_tol},
              {"ridge", c.ridge},
              {"n_starts", c.n_starts},
              {"seed", c.seed},
              {"factor_grid_sweeps", c.factor_grid_sweeps}};
}

EstimatorConfig estimator_config_from_json(const json& j) {
  EstimatorConfig c;
  c.q = j.value("q", c.q);
  if (j.contains("d")) {
    if (j["d"].is_string()) {
      if (j["d"].get<std::string>() != "auto") {
        throw ConfigError("estimator config: d must be an integer or \"auto\"");
      }
      c.d = 0;
    } else {
      c.d = j["d"].get<int>();
    }
  }
  c.eta = j.value("eta", c.eta);
  c.max_iter = j.value("max_iter", c.max_iter);
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.ridge = j.value("ridge", c.ridge);
  c.n_starts = j.value("n_starts", c.n_starts);
  c.seed = j.value("seed", c.seed);
  c.factor_grid_sweeps = j.value("factor_grid_sweeps", c.factor_grid_sweeps);
  validate(c);
  return c;
}

json dgp_spec_to_json(const DGPSpec& s) {
  return json{
      {"N", s.n_series},
      {"T", s.n_time},
      {"q", s.n_factors},
      {"function_source", s.function_source == FunctionSource::random_fourier
                              ? "random_fourier"
                              : "fixed_suite_plus_fourier"},
      {"noise_sd", s.noise_sd},
      {"factor_source",
       s.factor_source == FactorSource::iid_uniform ? "iid_uniform" : "ar1_copula"},
      {"theta", s.theta},
      {"burn_in", s.burn_in},
      {"seed", s.seed}};
}

DGPSpec dgp_spec_from_json(const json& j) {
  DGPSpec s;
  s.n_series = j.at("N").get<int>();
  s.n_time = j.at("T").get<int>();
  s.n_factors = j.value("q", 1);
  const std::string fs = j.value("function_source", "random_fourier");
  if (fs == "random_fourier") {
    s.function_source = FunctionSource::random_fourier;
  } else if (fs == "fixed_suite_plus_fourier") {
    s.function_source = FunctionSource::fixed_suite_plus_fourier;
  } else {
    throw ConfigError("dgp config: unknown function_source '" + fs + "'");
  }
  s.noise_sd = j.value("noise_sd", 1.0);
  const std::string facs = j.value("factor_source", "iid_uniform");
  if (facs == "iid_uniform") {
    s.factor_source = FactorSource::iid_uniform;
  } else if (facs == "ar1_copula") {
    s.factor_source = FactorSource::ar1_copula;
  } else {
    throw ConfigError("dgp config: unknown factor_source '" + facs + "'");
  }
  s.theta = j.value("theta", 0.5);
  s.burn_in = j.value("burn_in", 100);
  s.seed = j.value("seed", 0);
  validate(s);
  return s;
}

}  // namespace afm
