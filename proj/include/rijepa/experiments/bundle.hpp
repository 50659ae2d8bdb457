#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "rijepa/model/model.hpp"

namespace rijepa::experiments {

// A checkpoint whose header carries the model spec and whatever the
// discovery tools need to rebuild the domain ("context").
struct ModelBundle {
  model::DualEncoderModel model;
  std::uint64_t seed = 0;
  nlohmann::json context;
};

void write_bundle(const std::filesystem::path& path, const model::DualEncoderModel& m, std::uint64_t seed,
                  const nlohmann::json& context);
ModelBundle read_bundle(const std::filesystem::path& path);

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

}  // namespace rijepa::experiments
