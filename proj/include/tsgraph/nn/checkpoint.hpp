#pragma once

// Model checkpoint ("ATM1"), little-endian:
//   magic "ATM1" | u32 config JSON length | config JSON bytes
//   | u32 tensor count | per tensor: u32 rows | u32 cols | rows*cols x f64
// Tensors follow Model::named_parameters() order.

#include "tsgraph/nn/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace tsg::nn {

std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(std::string_view json);

std::string serialize_model(const Model& model);
/// Throws FormatError on malformed bytes and ConfigError when `expected` is
/// given and differs from the stored config.
Model deserialize_model(std::string_view bytes, const std::optional<ModelConfig>& expected = std::nullopt);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path,
                      const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace tsg::nn
