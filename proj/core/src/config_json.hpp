#pragma once

// Internal: JSON helpers shared by the space and scenario loaders.

#include <string>

#include "bmdlimits/transaction_space.hpp"
#include "json.hpp"

namespace bmdlimits::txn::detail {

SpaceConfig space_config_from_json(const nlohmann::json& j, const std::string& source);

}  // namespace bmdlimits::txn::detail
