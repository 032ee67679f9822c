#pragma once

#include <nlohmann/json.hpp>

#include "chromoseg/architecture.hpp"
#include "chromoseg/loss_reference.hpp"

// nlohmann adapters; missing keys keep their defaults.
namespace chromoseg {

void to_json(nlohmann::json& j, const GeneratorConfig& cfg);
void from_json(const nlohmann::json& j, GeneratorConfig& cfg);
void to_json(nlohmann::json& j, const DiscriminatorConfig& cfg);
void from_json(const nlohmann::json& j, DiscriminatorConfig& cfg);

namespace losses {
void to_json(nlohmann::json& j, const LossConfig& cfg);
void from_json(const nlohmann::json& j, LossConfig& cfg);
}  // namespace losses

}  // namespace chromoseg
