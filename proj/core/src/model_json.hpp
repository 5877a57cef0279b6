#pragma once

#include "json_util.hpp"
#include "mpplab/models.hpp"

namespace mpplab::detail {

ModelSpec model_from_json(const json& j, const std::string& path);
json model_to_json(const ModelSpec& spec);

} // namespace mpplab::detail
