#pragma once

#include <json.hpp>

#include "ltm/core/types.hpp"

namespace ltm {

nlohmann::json persona_to_json(const PersonaSentence& p);
PersonaSentence persona_from_json(const nlohmann::json& j);

nlohmann::json utterance_to_json(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& j);

}  // namespace ltm
