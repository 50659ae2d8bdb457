#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/numcore/tape.hpp"

namespace rijepa {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedTensor {
  std::string name;
  Tensor value;
};

// On-disk layout:
//   8 bytes  magic "RIJEPACK"
//   u32 LE   format version
//   u64 LE   header length in bytes
//   header   JSON {format_version, seed, hyperparameters, parameters:[{name, rows, cols}]}
//   payload  for each header entry, rows*cols little-endian IEEE-754 float64
struct Checkpoint {
  std::uint64_t seed = 0;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::vector<NamedTensor> tensors;

  const Tensor& find(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

Checkpoint snapshot(const std::vector<const Parameter*>& params, std::uint64_t seed,
                    nlohmann::json hyperparameters);
// Copies tensors into params by name; every param must be present with its shape.
void restore(const Checkpoint& ckpt, const std::vector<Parameter*>& params);

}  // namespace rijepa
