#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vpk/environment.h"

namespace vpk {

/// Registered ids: "cartpole", "toypong", "duelpong", "figure2".
std::vector<std::string> EnvironmentIds();

/// Builds an environment from its id and a params object (missing fields
/// take defaults). Throws std::invalid_argument for unknown ids.
std::unique_ptr<Environment> MakeEnvironment(const std::string& id,
                                             const nlohmann::json& params = {});

/// Default parameters of an environment as JSON.
nlohmann::json DefaultEnvironmentParams(const std::string& id);

}  // namespace vpk
