#include "rijepa/discover/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rijepa/numcore/errors.hpp"

namespace rijepa::discover {
namespace {

// Squared distances to every bank row and their minimum.
std::vector<double> distances(std::span<const double> z, const Tensor& bank, double tau) {
  if (bank.rows() == 0) throw std::invalid_argument("marginal context energy: empty latent bank");
  if (z.size() != bank.cols()) throw DimensionError("marginal context energy: latent width mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("marginal context energy: temperature must be positive");
  std::vector<double> d(bank.rows());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = squared_distance(z, bank.row_span(j));
  return d;
}

}  // namespace

double marginal_context_energy(std::span<const double> z, const Tensor& bank, double tau) {
  const auto d = distances(z, bank, tau);
  const double lo = *std::min_element(d.begin(), d.end());
  double s = 0.0;
  for (double v : d) s += std::exp(-(v - lo) / tau);
  return lo - tau * std::log(s);
}

std::vector<double> marginal_context_gradient(std::span<const double> z, const Tensor& bank, double tau) {
  const auto d = distances(z, bank, tau);
  const double lo = *std::min_element(d.begin(), d.end());
  std::vector<double> w(d.size());
  double s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) s += w[j] = std::exp(-(d[j] - lo) / tau);
  std::vector<double> g(z.size(), 0.0);
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double wj = w[j] / s;
    const auto row = bank.row_span(j);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += 2.0 * wj * (z[k] - row[k]);
  }
  return g;
}

DiscoveryResult langevin_marginal(const Tensor& bank, std::vector<double> z_c, const LangevinConfig& cfg,
                                  RngStream& rng, double tau) {
  cfg.validate();
  const double noise = cfg.noise_scale();
  DiscoveryResult out;
  out.energy.reserve(cfg.iterations + 1);
  auto record = [&](std::size_t k) {
    const double e = marginal_context_energy(z_c, bank, tau);
    if (!std::isfinite(e)) {
      throw NumericalError("context energy became non-finite at iteration " + std::to_string(k));
    }
    out.energy.push_back(e);
  };
  record(0);
  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    const auto g = marginal_context_gradient(z_c, bank, tau);
    for (std::size_t i = 0; i < z_c.size(); ++i) {
      z_c[i] -= cfg.step_size * g[i];
      if (noise > 0.0) z_c[i] += noise * rng.normal();
      if (cfg.clamp) z_c[i] = std::clamp(z_c[i], cfg.clamp->first, cfg.clamp->second);
    }
    record(k);
  }
  out.context = std::move(z_c);
  return out;
}

double mh_acceptance_probability(double pi_new, double pi_old) {
  if (!(pi_new >= 0.0) || !(pi_old >= 0.0)) {
    throw std::invalid_argument("validator scores must be non-negative numbers");
  }
  if (pi_old == 0.0) return 1.0;
  return std::min(1.0, pi_new / pi_old);
}

bool mh_accept(double pi_new, double pi_old, RngStream& rng) {
  const double a = mh_acceptance_probability(pi_new, pi_old);
  // Always draw, so the stream position does not depend on the scores.
  const double u = rng.uniform();
  return u < a;
}

std::vector<DiscoveryStep> discover_marginal(const model::DualEncoderModel& m, const Tensor& bank,
                                            const LangevinConfig& cfg, std::size_t proposals,
                                            const Decoder& decoder, const Validator& validator,
                                            RngStream& rng, double tau) {
  std::vector<DiscoveryStep> out;
  out.reserve(proposals);
  RngStream mh = rng.substream("mh");
  bool have_current = false;
  double current_score = 0.0;
  for (std::size_t i = 0; i < proposals; ++i) {
    RngStream chain_rng = rng.substream("proposal" + std::to_string(i));
    DiscoveryStep s;
    s.chain = langevin_marginal(bank, sample_latent(chain_rng, m.latent_dim()), cfg, chain_rng, tau);
    s.chain.target = m.predict(Tensor::row(s.chain.context)).row_vector(0);
    s.proposal = decoder(s.chain.context, s.chain.target);
    try {
      s.score = validator(s.proposal);
      if (!(s.score >= 0.0) || !std::isfinite(s.score)) {
        throw std::invalid_argument("validator returned an invalid score");
      }
      if (!have_current) {
        s.acceptance_probability = 1.0;
        s.accepted = true;
        mh.uniform();
      } else {
        s.acceptance_probability = mh_acceptance_probability(s.score, current_score);
        s.accepted = mh_accept(s.score, current_score, mh);
      }
    } catch (const std::exception& e) {
      s.accepted = false;
      s.diagnostic = e.what();
    }
    if (s.accepted) {
      have_current = true;
      current_score = s.score;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rijepa::discover
