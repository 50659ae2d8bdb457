#include "rijepa/discover/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rijepa/numcore/errors.hpp"

namespace rijepa::discover {
namespace {

void check_dim(const model::DualEncoderModel& m, std::span<const double> z, const char* what) {
  if (z.size() != m.latent_dim()) {
    throw DimensionError(std::string(what) + " has " + std::to_string(z.size()) +
                         " entries, latent_dim is " + std::to_string(m.latent_dim()));
  }
}

void require_finite(double e, std::size_t iteration) {
  if (!std::isfinite(e)) {
    throw NumericalError("Langevin energy became non-finite at iteration " + std::to_string(iteration));
  }
}

void step(std::vector<double>& z, const std::vector<double>& grad, const LangevinConfig& cfg,
          double noise, RngStream& rng) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] -= cfg.step_size * grad[i];
    if (noise > 0.0) z[i] += noise * rng.normal();
    if (cfg.clamp) z[i] = std::clamp(z[i], cfg.clamp->first, cfg.clamp->second);
  }
}

DiscoveryResult run(const model::DualEncoderModel& m, std::vector<double> z_c, std::vector<double> z_t,
                    const LangevinConfig& cfg, RngStream& rng, bool move_context, bool move_target) {
  cfg.validate();
  check_dim(m, z_c, "z_c");
  check_dim(m, z_t, "z_t");
  const double noise = cfg.noise_scale();
  DiscoveryResult out;
  out.energy.reserve(cfg.iterations + 1);
  PairEnergy e = pair_energy(m, z_c, z_t);
  require_finite(e.value, 0);
  out.energy.push_back(e.value);
  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    if (move_context) step(z_c, e.grad_context, cfg, noise, rng);
    if (move_target) step(z_t, e.grad_target, cfg, noise, rng);
    e = pair_energy(m, z_c, z_t);
    require_finite(e.value, k);
    out.energy.push_back(e.value);
  }
  out.context = std::move(z_c);
  out.target = std::move(z_t);
  return out;
}

}  // namespace

std::string to_string(LangevinMode m) {
  switch (m) {
    case LangevinMode::Joint: return "joint";
    case LangevinMode::Forward: return "forward";
    case LangevinMode::Abductive: return "abductive";
    case LangevinMode::Marginal: return "marginal";
  }
  return "?";
}

LangevinMode parse_langevin_mode(const std::string& s) {
  if (s == "joint") return LangevinMode::Joint;
  if (s == "forward") return LangevinMode::Forward;
  if (s == "abductive") return LangevinMode::Abductive;
  if (s == "marginal") return LangevinMode::Marginal;
  throw std::invalid_argument("unknown discovery mode '" + s + "'");
}

double LangevinConfig::noise_scale() const { return std::sqrt(2.0 * step_size * temperature); }

void LangevinConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("Langevin step size must be positive");
  if (!(temperature >= 0.0)) throw std::invalid_argument("Langevin temperature must be non-negative");
  if (iterations < 1) throw std::invalid_argument("Langevin needs at least one iteration");
  if (clamp && !(clamp->first < clamp->second)) throw std::invalid_argument("Langevin clamp must satisfy lo < hi");
}

PairEnergy pair_energy(const model::DualEncoderModel& m, std::span<const double> z_c,
                       std::span<const double> z_t) {
  Tape tape;
  Var c = tape.input(Tensor::row(z_c));
  Var t = tape.input(Tensor::row(z_t));
  Var e = tape.sum(tape.row_sq_distance(m.predictor().forward(tape, c), t));
  tape.backward(e);
  return {tape.scalar(e), tape.grad(c).data(), tape.grad(t).data()};
}

DiscoveryResult langevin_joint(const model::DualEncoderModel& m, std::vector<double> z_c,
                               std::vector<double> z_t, const LangevinConfig& cfg, RngStream& rng) {
  return run(m, std::move(z_c), std::move(z_t), cfg, rng, true, true);
}

DiscoveryResult langevin_forward(const model::DualEncoderModel& m, std::vector<double> z_c,
                                 std::vector<double> z_t, const LangevinConfig& cfg, RngStream& rng) {
  return run(m, std::move(z_c), std::move(z_t), cfg, rng, false, true);
}

DiscoveryResult langevin_abductive(const model::DualEncoderModel& m, std::vector<double> z_c,
                                   std::vector<double> z_t, const LangevinConfig& cfg,
                                   RngStream& rng) {
  return run(m, std::move(z_c), std::move(z_t), cfg, rng, true, false);
}

std::vector<double> sample_latent(RngStream& rng, std::size_t dim) {
  std::vector<double> z(dim);
  for (double& v : z) v = rng.normal();
  return z;
}

}  // namespace rijepa::discover
