#pragma once

#include "sparsevss/harness.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sparsevss {

/// Configuration input that cannot be applied; the message names the field.
class ConfigError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

/// Field names accepted in config documents and overrides.
const std::vector<std::string>& config_keys();

/// Pretty-printed JSON with every field, keys sorted. Unset optionals are null.
std::string config_to_json(const ExperimentConfig& config);

/// Applies the fields present in `json_text` on top of `base`. Unknown keys
/// and ill-typed values raise ConfigError. List-valued fields also accept a
/// single scalar.
ExperimentConfig config_from_json(std::string_view json_text, const ExperimentConfig& base = {});

/// Applies one `key=value` override. The value is read as JSON when it
/// parses as JSON, otherwise as a bare string.
void apply_override(ExperimentConfig& config, std::string_view assignment);

}  // namespace sparsevss
