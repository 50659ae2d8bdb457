#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/discover/decode.hpp"
#include "rijepa/discover/marginal.hpp"
#include "rijepa/rulemine/rules.hpp"

namespace rijepa::discover {

// Everything the samplers need to know about one problem domain. The
// callables hold references to the model and knowledge base they were built from.
struct Domain {
  std::string name;
  Decoder decoder;
  Validator validator;
  // Context latents of the training inputs, for E_ctx.
  Tensor context_bank;
  // Condition text (--condition / --outcome) to a fixed context or target latent.
  std::function<std::vector<double>(const std::string&)> condition_latent;
  std::function<std::vector<double>(const std::string&)> outcome_latent;
};

// π = exp(−‖C − (A + offset)‖²).
double synthetic_validity(std::span<const double> antecedent, std::span<const double> consequent,
                          std::span<const double> offset);

struct SyntheticDomainOptions {
  double lo = -5.0;
  double hi = 5.0;
  std::size_t points_per_axis = 21;
  std::vector<double> rule_offset{1.0, 1.0, 1.0};
};

// Continuous 3-D domain: latents decode to the nearest grid point through
// the shared f_c (context) or f_t (target) encoder. Conditions are "x,y,z".
Domain synthetic_domain(const model::DualEncoderModel& m, const Tensor& training_inputs,
                        const SyntheticDomainOptions& options = {});

// 1 when the knowledge base gives the pair confidence ≥ threshold, else floor.
double clinical_validity(const rulemine::TransactionIndex& index,
                         const std::vector<std::string>& antecedent, const std::string& consequent,
                         double threshold = 0.5, double floor = 0.1);

struct ClinicalDomainOptions {
  std::size_t k = 10;
  bool median_threshold = true;
};

// Symbolic domain over the rule vocabulary. Antecedents decode against the
// f_c_rule token dictionary, consequents against f_t_rule. Conditions are
// token lists joined by " AND " or ",".
Domain clinical_domain(const model::DualEncoderModel& m, const rulemine::Vocabulary& vocabulary,
                       const rulemine::TransactionIndex& knowledge, const Tensor& training_inputs,
                       const ClinicalDomainOptions& options = {});

std::vector<std::string> split_condition(const std::string& text);

// g(f_c_data(x)) decoded against the f_t_rule dictionary.
DecodedProfile translate_patient(const model::DualEncoderModel& m, std::span<const double> x,
                                 const rulemine::Vocabulary& vocabulary, std::size_t k = 10,
                                 bool median_threshold = true);

// Risk token of a consequent profile, if any survived decoding.
std::optional<std::string> risk_token(const DecodedProfile& consequent);

// Runs `chains` independent chains of the configured mode; chain i draws
// from rng.substream("chain<i>"). A condition fixes z_c (forward mode), an
// outcome fixes z_t (abductive mode). Marginal mode treats chains as MH
// proposals.
std::vector<DiscoveryStep> run_discovery(const model::DualEncoderModel& m, const Domain& domain,
                                         const LangevinConfig& cfg, std::size_t chains,
                                         const RngStream& rng, const std::string& condition = "",
                                         const std::string& outcome = "");

nlohmann::json to_json(const DecodedProfile& p);
nlohmann::json discovery_report(const Domain& domain, const LangevinConfig& cfg,
                                const std::vector<DiscoveryStep>& steps, const std::string& condition,
                                const std::string& outcome);
// Long format: chain, iteration, energy.
void write_energy_csv(const std::string& path, const std::vector<DiscoveryStep>& steps);

}  // namespace rijepa::discover
