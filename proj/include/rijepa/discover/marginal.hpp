#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rijepa/discover/decode.hpp"
#include "rijepa/discover/langevin.hpp"
#include "rijepa/rulemine/rule.hpp"

namespace rijepa::discover {

inline constexpr double kContextTemperature = 0.5;

// E_ctx(z) = −τ·log Σ_j exp(−‖z − z_j‖²/τ) over stored context latents.
double marginal_context_energy(std::span<const double> z, const Tensor& bank,
                               double tau = kContextTemperature);
// Softmax-weighted Σ_j w_j·2(z − z_j).
std::vector<double> marginal_context_gradient(std::span<const double> z, const Tensor& bank,
                                              double tau = kContextTemperature);

// Langevin over z_c alone under E_ctx; target is left empty.
DiscoveryResult langevin_marginal(const Tensor& bank, std::vector<double> z_c, const LangevinConfig& cfg,
                                  RngStream& rng, double tau = kContextTemperature);

// min(1, π_new/π_old); 1 when π_old is 0. Throws on negative or NaN scores.
double mh_acceptance_probability(double pi_new, double pi_old);
bool mh_accept(double pi_new, double pi_old, RngStream& rng);

// A decoded candidate rule. Continuous domains fill the points, symbolic
// domains fill the token profiles.
struct Proposal {
  std::vector<double> context_latent;
  std::vector<double> target_latent;
  std::vector<double> antecedent_point;
  std::vector<double> consequent_point;
  DecodedProfile antecedent;
  DecodedProfile consequent;
};

using Decoder = std::function<Proposal(std::span<const double> z_c, std::span<const double> z_t)>;
using Validator = std::function<double(const Proposal&)>;

// One chain or proposal. The acceptance fields are only set by the marginal
// sampler; the other modes score proposals for reporting only.
struct DiscoveryStep {
  DiscoveryResult chain;
  Proposal proposal;
  double score = 0.0;
  double acceptance_probability = 0.0;
  bool accepted = false;
  std::string diagnostic;
};

// For each proposal: Langevin on z_c under E_ctx from z0 ~ N(0, I), then
// ẑ_t = g(z_c), decode, and a Metropolis–Hastings test against the last
// accepted proposal (the first valid one is accepted outright).
std::vector<DiscoveryStep> discover_marginal(const model::DualEncoderModel& m, const Tensor& bank,
                                            const LangevinConfig& cfg, std::size_t proposals,
                                            const Decoder& decoder, const Validator& validator,
                                            RngStream& rng, double tau = kContextTemperature);

}  // namespace rijepa::discover
