#include "rijepa/numcore/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

namespace rijepa {
namespace {

constexpr char kMagic[8] = {'R', 'I', 'J', 'E', 'P', 'A', 'C', 'K'};

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) {
    throw CheckpointError("checkpoint truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += static_cast<std::size_t>(bytes);
  return v;
}

}  // namespace

const Tensor& Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw CheckpointError("checkpoint has no tensor named '" + name + "'");
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["seed"] = ckpt.seed;
  header["hyperparameters"] = ckpt.hyperparameters;
  header["parameters"] = nlohmann::json::array();
  for (const auto& t : ckpt.tensors) {
    header["parameters"].push_back(
        {{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
  }
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_le(out, kCheckpointVersion, 4);
  put_le(out, header_text.size(), 8);
  out += header_text;
  for (const auto& t : ckpt.tensors)
    for (double v : t.value.data()) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || bytes.compare(0, sizeof kMagic, kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  std::size_t pos = sizeof kMagic;
  const auto version = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = get_le(bytes, pos, 8);
  if (pos + header_len > bytes.size()) throw CheckpointError("checkpoint header truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint header: ") + e.what());
  }
  pos += header_len;

  Checkpoint ckpt;
  ckpt.seed = header.value("seed", std::uint64_t{0});
  ckpt.hyperparameters = header.value("hyperparameters", nlohmann::json::object());
  for (const auto& entry : header.at("parameters")) {
    const auto rows = entry.at("rows").get<std::size_t>();
    const auto cols = entry.at("cols").get<std::size_t>();
    Tensor t(rows, cols);
    for (double& v : t.data()) v = std::bit_cast<double>(get_le(bytes, pos, 8));
    ckpt.tensors.push_back({entry.at("name").get<std::string>(), std::move(t)});
  }
  if (pos != bytes.size()) throw CheckpointError("trailing bytes after checkpoint payload");
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_checkpoint(bytes);
}

Checkpoint snapshot(const std::vector<const Parameter*>& params, std::uint64_t seed,
                    nlohmann::json hyperparameters) {
  Checkpoint ckpt;
  ckpt.seed = seed;
  ckpt.hyperparameters = std::move(hyperparameters);
  for (const Parameter* p : params) ckpt.tensors.push_back({p->name(), p->value()});
  return ckpt;
}

void restore(const Checkpoint& ckpt, const std::vector<Parameter*>& params) {
  for (Parameter* p : params) {
    const Tensor& t = ckpt.find(p->name());
    if (!t.same_shape(p->value())) {
      throw CheckpointError("shape mismatch for '" + p->name() + "': checkpoint " +
                            t.shape_string() + ", model " + p->value().shape_string());
    }
    p->value() = t;
  }
}

}  // namespace rijepa
