#pragma once

#include <json.hpp>

#include "kerrkit/kernels.hpp"

namespace kerrkit::detail {

nlohmann::json spec_to_json(const KernelSpec& spec);
KernelSpec spec_from_json(const nlohmann::json& j);

}  // namespace kerrkit::detail
