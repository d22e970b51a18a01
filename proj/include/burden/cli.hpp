#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "burden/cost.hpp"
#include "burden/types.hpp"

namespace burden {

// Subcommand entry points. Each takes a fully merged configuration (defaults
// overridden by file values overridden by flags), writes its outputs under
// config["out"], and returns the process exit code: 0 success, 1 reported
// computation infeasibility, 2 usage or validation error.
int run_synth(const nlohmann::json& config, std::ostream& log);
int run_sweep(const nlohmann::json& config, std::ostream& log);
int run_train(const nlohmann::json& config, std::ostream& log);
int run_audit(const nlohmann::json& config, std::ostream& log);

nlohmann::json default_synth_config();
nlohmann::json default_sweep_config();
nlohmann::json default_train_config();
nlohmann::json default_audit_config();

// Rejects unknown keys against the command's default schema.
void validate_config_keys(const nlohmann::json& config, const nlohmann::json& defaults,
                          const std::string& command);

// Cost-model description shared by the audit/train configs. Entries may be
// numbers or the string "inf".
CostModel parse_cost_config(const nlohmann::json& spec,
                            const std::vector<std::string>& feature_names);

int cli_main(int argc, const char* const* argv);

}  // namespace burden
