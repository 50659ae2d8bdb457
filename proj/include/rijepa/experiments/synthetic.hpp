#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/experiments/pca.hpp"
#include "rijepa/experiments/training.hpp"
#include "rijepa/model/model.hpp"
#include "rijepa/objectives/losses.hpp"

namespace rijepa::experiments {

using Vec3 = std::array<double, 3>;

struct SyntheticConfig {
  std::size_t n_data = 1000;
  std::size_t n_rules = 200;
  std::size_t n_negatives = 500;
  std::size_t n_test = 300;
  Vec3 mu1{2.0, 2.0, 0.0};
  Vec3 mu2{-2.0, -2.0, 0.0};
  Vec3 mu_neg1{-3.0, 3.0, 0.0};
  Vec3 mu_neg2{3.0, -3.0, 0.0};
  double rule_variance = 0.5;  // Σ = 0.5·I
  double data_scale = 1.5;     // data covariance 1.5·Σ
  Vec3 rule_offset{1.0, 1.0, 1.0};
  double noise_sd = 0.2;
  std::size_t epochs = 500;
  double learning_rate = 1e-3;
  double margin = 5.0;
  double invalid_weight = 1.0;  // λ
  double beta = 1.0;
  double ema_tau = 0.99;
  std::uint64_t seed = 111;
  // Also train the positive-only pairwise baseline (JEPA + β·Σ‖ẑ − z‖²).
  bool train_pairwise = true;
  std::size_t grid_resolution = 100;
  double grid_lo = -5.0;
  double grid_hi = 5.0;

  void validate() const;
};

nlohmann::json to_json(const SyntheticConfig& c);
// Missing keys keep their defaults; unknown keys are an error.
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);

struct SyntheticData {
  Tensor x, y;            // raw observations and targets
  Tensor rule_a, rule_c;  // valid rules
  Tensor neg_a, neg_c;    // invalid rules
  Tensor id_a, id_c;      // in-distribution test rules
  Tensor ood_a, ood_c;    // out-of-distribution test rules
};

// Observations x ~ N(μ_k, 1.5Σ), y = x + offset + N(0, σ²I); rules A ~ N(μ_k, Σ),
// C = A + offset; negatives from the OOD centers with rejected offsets; test
// sets around the valid and the OOD centers with the true rule applied.
// Each part draws from its own substream of the master seed.
SyntheticData make_synthetic_data(const SyntheticConfig& cfg, const RngStream& master);

enum class SyntheticVariant { Classic, Pairwise, RiJepa };
std::string to_string(SyntheticVariant v);

// Full-batch AdamW; EMA on the target after each step. Throws NumericalError
// naming the epoch when the loss stops being finite.
TrainedModel train_synthetic(SyntheticVariant variant, const SyntheticData& data, const SyntheticConfig& cfg,
                             const RngStream& master);

// Rows (x, y, E(A, A + offset)) over a square grid at z = 0.
struct GridSpec {
  double lo = -5.0;
  double hi = 5.0;
  std::size_t resolution = 100;
};
Tensor rasterize_energy(const model::DualEncoderModel& m, const GridSpec& grid, const Vec3& offset);

double mean_energy(const model::DualEncoderModel& m, const Tensor& a, const Tensor& c);

struct GridSummary {
  double min = 0.0, max = 0.0;
  // Lowest grid point on each side of the x + y = 0 diagonal.
  std::array<double, 2> argmin_upper{}, argmin_lower{};
};
GridSummary summarize_grid(const Tensor& grid);

struct SyntheticModelReport {
  std::string name;
  double id_energy = 0.0;
  double ood_energy = 0.0;
  objectives::LossComponents final_loss;
  Tensor grid;
  GridSummary grid_summary;
};

struct SyntheticReport {
  SyntheticConfig config;
  std::vector<SyntheticModelReport> models;
  std::vector<TrainedModel> trained;
  PcaResult pca;
  std::vector<std::string> pca_model;  // per projected row
  std::vector<std::string> pca_set;    // "id" / "ood"
  SyntheticData data;

  const SyntheticModelReport& find(const std::string& name) const;
};

SyntheticReport run_synthetic(const SyntheticConfig& cfg);

nlohmann::json synthetic_metrics(const SyntheticReport& r);
// energy_table.csv, landscape_<model>.csv, pca_projection.csv, metrics.json,
// model_<name>.ckpt bundles and manifest.json.
void write_synthetic_report(const SyntheticReport& r, const std::filesystem::path& dir);

}  // namespace rijepa::experiments
