#include "chromoseg/config_json.hpp"

#include "chromoseg/error.hpp"

namespace chromoseg {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(nlohmann::json& j, const GeneratorConfig& cfg) {
  j = {{"filters", cfg.filters},
       {"in_channels", cfg.in_channels},
       {"classes", cfg.classes},
       {"input_size", cfg.input_size},
       {"upsample", to_string(cfg.upsample)}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& cfg) {
  read_if(j, "filters", cfg.filters);
  read_if(j, "in_channels", cfg.in_channels);
  read_if(j, "classes", cfg.classes);
  read_if(j, "input_size", cfg.input_size);
  if (j.contains("upsample")) cfg.upsample = parse_upsample_mode(j.at("upsample").get<std::string>());
}

void to_json(nlohmann::json& j, const DiscriminatorConfig& cfg) {
  j = {{"channels", cfg.channels},     {"strides", cfg.strides},
       {"paddings", cfg.paddings},     {"kernel", cfg.kernel},
       {"leaky_slope", cfg.leaky_slope}, {"in_channels", cfg.in_channels},
       {"logistic_output", cfg.logistic_output}};
}

void from_json(const nlohmann::json& j, DiscriminatorConfig& cfg) {
  read_if(j, "channels", cfg.channels);
  read_if(j, "strides", cfg.strides);
  read_if(j, "paddings", cfg.paddings);
  read_if(j, "kernel", cfg.kernel);
  read_if(j, "leaky_slope", cfg.leaky_slope);
  read_if(j, "in_channels", cfg.in_channels);
  read_if(j, "logistic_output", cfg.logistic_output);
}

namespace losses {

void to_json(nlohmann::json& j, const LossConfig& cfg) {
  j = {{"kind", to_string(cfg.kind)},
       {"lambda", cfg.lambda},
       {"class_weights", cfg.class_weights},
       {"present_classes_only", cfg.present_classes_only},
       {"per_image", cfg.per_image}};
}

void from_json(const nlohmann::json& j, LossConfig& cfg) {
  if (j.contains("kind")) cfg.kind = parse_loss_kind(j.at("kind").get<std::string>());
  read_if(j, "lambda", cfg.lambda);
  read_if(j, "class_weights", cfg.class_weights);
  read_if(j, "present_classes_only", cfg.present_classes_only);
  read_if(j, "per_image", cfg.per_image);
}

}  // namespace losses
}  // namespace chromoseg
