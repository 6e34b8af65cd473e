#pragma once

#include <json.hpp>
#include <string>

namespace afm {

// Subcommand bodies shared by the CLI and the integration tests.  Each takes
// the parsed JSON config and an output directory, writes its artifacts, and
// throws ConfigError / DataError / NumericalError on failure.

void run_simulate(const nlohmann::json& config, const std::string& out_dir);
void run_fit(const nlohmann::json& config, const std::string& out_dir);
nlohmann::json run_eval(const nlohmann::json& config, const std::string& out_dir);
void run_mc_cmd(const nlohmann::json& config, const std::string& out_dir);
nlohmann::json run_transform(const nlohmann::json& config, const std::string& out_dir);

}  // namespace afm
