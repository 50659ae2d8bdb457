#include "rijepa/experiments/bundle.hpp"

#include "rijepa/numcore/checkpoint.hpp"

namespace rijepa::experiments {

void write_bundle(const std::filesystem::path& path, const model::DualEncoderModel& m, std::uint64_t seed,
                  const nlohmann::json& context) {
  nlohmann::json header{{"spec", model::to_json(m.spec())}, {"context", context}};
  write_checkpoint(path, snapshot(m.all_parameters(), seed, std::move(header)));
}

ModelBundle read_bundle(const std::filesystem::path& path) {
  const Checkpoint ckpt = read_checkpoint(path);
  if (!ckpt.hyperparameters.contains("spec")) throw CheckpointError(path.string() + ": no model spec in header");
  model::ModelSpec spec;
  try {
    spec = model::model_spec_from_json(ckpt.hyperparameters.at("spec"));
  } catch (const std::exception& e) {
    throw CheckpointError(path.string() + ": bad model spec: " + e.what());
  }
  ModelBundle b{model::DualEncoderModel(spec, RngStream(ckpt.seed)), ckpt.seed,
                ckpt.hyperparameters.value("context", nlohmann::json::object())};
  restore(ckpt, b.model.all_parameters());
  return b;
}

nlohmann::json tensor_to_json(const Tensor& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) rows.push_back(t.row_vector(i));
  return rows;
}

Tensor tensor_from_json(const nlohmann::json& j) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
  if (rows.empty()) throw std::invalid_argument("empty tensor in JSON");
  return stack_rows(rows);
}

}  // namespace rijepa::experiments
