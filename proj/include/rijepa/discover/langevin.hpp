#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rijepa/model/model.hpp"
#include "rijepa/numcore/rng.hpp"

namespace rijepa::discover {

enum class LangevinMode { Joint, Forward, Abductive, Marginal };

std::string to_string(LangevinMode m);
LangevinMode parse_langevin_mode(const std::string& s);

struct LangevinConfig {
  double step_size = 0.1;     // η
  double temperature = 1e-4;  // T; noise scale √(2ηT) = 0.01·√(2η) by default
  std::size_t iterations = 100;
  LangevinMode mode = LangevinMode::Joint;
  std::optional<std::pair<double, double>> clamp;

  double noise_scale() const;
  void validate() const;
};

struct DiscoveryResult {
  std::vector<double> context;  // final z_c
  std::vector<double> target;   // final z_t (g(z_c) in marginal mode)
  std::vector<double> energy;   // K + 1 entries, initial state first
};

// ‖g(z_c) − z_t‖² with gradients in both arguments; the predictor is frozen.
struct PairEnergy {
  double value = 0.0;
  std::vector<double> grad_context;
  std::vector<double> grad_target;
};
PairEnergy pair_energy(const model::DualEncoderModel& m, std::span<const double> z_c,
                       std::span<const double> z_t);

// z ← z − η∇E + √(2ηT)·ε over the free coordinates. Throws NumericalError on a
// non-finite energy.
DiscoveryResult langevin_joint(const model::DualEncoderModel& m, std::vector<double> z_c,
                               std::vector<double> z_t, const LangevinConfig& cfg, RngStream& rng);
DiscoveryResult langevin_forward(const model::DualEncoderModel& m, std::vector<double> z_c,
                                 std::vector<double> z_t, const LangevinConfig& cfg, RngStream& rng);
DiscoveryResult langevin_abductive(const model::DualEncoderModel& m, std::vector<double> z_c,
                                   std::vector<double> z_t, const LangevinConfig& cfg,
                                   RngStream& rng);

// Standard normal latent of the given width.
std::vector<double> sample_latent(RngStream& rng, std::size_t dim);

}  // namespace rijepa::discover
