#include "chromoseg/nn/checkpoint.hpp"

#include "chromoseg/config_json.hpp"
#include "chromoseg/error.hpp"

namespace chromoseg::nn {

namespace {

checkpoint::TensorRecord record(const std::string& name, const torch::Tensor& t, const char* kind) {
  checkpoint::TensorRecord r;
  r.name = name;
  r.kind = kind;
  r.shape.assign(t.sizes().begin(), t.sizes().end());
  const auto flat = t.detach().to(torch::kCPU).to(torch::kFloat32).contiguous();
  r.values.assign(flat.data_ptr<float>(), flat.data_ptr<float>() + flat.numel());
  return r;
}

}  // namespace

checkpoint::Section export_section(torch::nn::Module& module, const std::string& name,
                                   const nlohmann::json& config) {
  checkpoint::Section section{name, config, {}};
  for (const auto& item : module.named_parameters()) section.tensors.push_back(record(item.key(), item.value(), "parameter"));
  for (const auto& item : module.named_buffers()) section.tensors.push_back(record(item.key(), item.value(), "buffer"));
  return section;
}

void import_section(torch::nn::Module& module, const checkpoint::Section& section) {
  std::map<std::string, torch::Tensor> targets;
  for (const auto& item : module.named_parameters()) targets.emplace(item.key(), item.value());
  for (const auto& item : module.named_buffers()) targets.emplace(item.key(), item.value());
  if (targets.size() != section.tensors.size()) {
    throw IoError("checkpoint section '" + section.name + "' has " + std::to_string(section.tensors.size()) +
                  " tensors, model expects " + std::to_string(targets.size()));
  }
  torch::NoGradGuard no_grad;
  for (const auto& t : section.tensors) {
    const auto it = targets.find(t.name);
    if (it == targets.end()) throw IoError("unexpected tensor '" + t.name + "' in checkpoint");
    auto& target = it->second;
    if (std::vector<std::int64_t>(target.sizes().begin(), target.sizes().end()) != t.shape) {
      throw IoError("shape mismatch for tensor '" + t.name + "'");
    }
    const auto src = torch::from_blob(const_cast<float*>(t.values.data()), target.sizes(), torch::kFloat32);
    target.copy_(src.to(target.dtype()));
  }
}

void save_models(const std::filesystem::path& manifest_path, Generator& generator,
                 Discriminator* discriminator, const nlohmann::json& metadata) {
  checkpoint::Checkpoint ckpt;
  ckpt.metadata = metadata;
  ckpt.sections.push_back(export_section(*generator, "generator", nlohmann::json(generator->config())));
  if (discriminator != nullptr) {
    ckpt.sections.push_back(
        export_section(**discriminator, "discriminator", nlohmann::json((*discriminator)->config())));
  }
  checkpoint::save(manifest_path, ckpt);
}

Generator load_generator(const std::filesystem::path& manifest_path) {
  const auto ckpt = checkpoint::load(manifest_path);
  const auto* section = ckpt.find("generator");
  if (section == nullptr) throw IoError("checkpoint has no generator section");
  GeneratorConfig cfg;
  try {
    cfg = section->config.get<GeneratorConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("corrupt generator config: ") + e.what());
  }
  Generator g(cfg);
  import_section(*g, *section);
  return g;
}

void load_into(const std::filesystem::path& manifest_path, Generator& generator, Discriminator* discriminator) {
  const auto ckpt = checkpoint::load(manifest_path);
  const auto* gs = ckpt.find("generator");
  if (gs == nullptr) throw IoError("checkpoint has no generator section");
  import_section(*generator, *gs);
  if (discriminator != nullptr) {
    const auto* ds = ckpt.find("discriminator");
    if (ds == nullptr) throw IoError("checkpoint has no discriminator section");
    import_section(**discriminator, *ds);
  }
}

}  // namespace chromoseg::nn
