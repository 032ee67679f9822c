#pragma once

#include <torch/torch.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "chromoseg/checkpoint_io.hpp"
#include "chromoseg/nn/discriminator.hpp"
#include "chromoseg/nn/generator.hpp"

namespace chromoseg::nn {

// Parameters then buffers, each in registration order.
checkpoint::Section export_section(torch::nn::Module& module, const std::string& name,
                                   const nlohmann::json& config);

// Copies every tensor in `section` into `module`; names and shapes must
// match exactly. Throws IoError otherwise.
void import_section(torch::nn::Module& module, const checkpoint::Section& section);

// `discriminator` may be null for generator-only checkpoints.
void save_models(const std::filesystem::path& manifest_path, Generator& generator,
                 Discriminator* discriminator, const nlohmann::json& metadata = nlohmann::json::object());

// Builds a generator from the config stored in the checkpoint.
Generator load_generator(const std::filesystem::path& manifest_path);

void load_into(const std::filesystem::path& manifest_path, Generator& generator, Discriminator* discriminator);

}  // namespace chromoseg::nn
