#include "rijepa/discover/domains.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "rijepa/model/symbolic.hpp"
#include "rijepa/numcore/format.hpp"

namespace rijepa::discover {
namespace {

using model::Modality;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_point(const std::string& text, std::size_t dim) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw std::invalid_argument("bad coordinate '" + part + "' in '" + text + "'");
    v.push_back(x);
  }
  if (v.size() != dim) {
    throw std::invalid_argument("point '" + text + "' needs " + std::to_string(dim) + " coordinates");
  }
  return v;
}

Tensor grid_points(const SyntheticDomainOptions& o) {
  if (o.points_per_axis < 2 || !(o.lo < o.hi)) throw std::invalid_argument("synthetic decoding grid is empty");
  const std::size_t n = o.points_per_axis;
  const double step = (o.hi - o.lo) / static_cast<double>(n - 1);
  Tensor g(n * n * n, 3);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k, ++r) {
        g(r, 0) = o.lo + step * static_cast<double>(i);
        g(r, 1) = o.lo + step * static_cast<double>(j);
        g(r, 2) = o.lo + step * static_cast<double>(k);
      }
  return g;
}

TokenDictionary restrict(const TokenDictionary& d, bool keep_risk) {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < d.tokens.size(); ++i) {
    const bool risk = rulemine::Item::parse(d.tokens[i]).feature == rulemine::kRiskFeature;
    if (risk && !keep_risk) continue;
    tokens.push_back(d.tokens[i]);
    rows.push_back(d.latents.row_vector(i));
  }
  return TokenDictionary::build(std::move(tokens), stack_rows(rows));
}

Tensor multi_hot(const std::vector<std::string>& tokens, const rulemine::Vocabulary& vocabulary) {
  if (tokens.empty()) throw std::invalid_argument("condition has no tokens");
  Tensor v(1, vocabulary.size());
  for (const auto& t : tokens) v(0, vocabulary.index_of(t)) = 1.0;
  return v;
}

std::vector<std::string> profile_tokens(const DecodedProfile& p) {
  std::vector<std::string> out;
  for (const auto& t : p.deduped) out.push_back(t.token);
  return out;
}

}  // namespace

double synthetic_validity(std::span<const double> antecedent, std::span<const double> consequent,
                          std::span<const double> offset) {
  if (antecedent.size() != consequent.size() || antecedent.size() != offset.size()) {
    throw DimensionError("synthetic validity: point widths differ");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < antecedent.size(); ++i) {
    const double r = consequent[i] - antecedent[i] - offset[i];
    d += r * r;
  }
  return std::exp(-d);
}

Domain synthetic_domain(const model::DualEncoderModel& m, const Tensor& training_inputs,
                        const SyntheticDomainOptions& options) {
  if (m.spec().layout != model::EncoderLayout::Unified) {
    throw std::invalid_argument("synthetic domain needs the unified encoder layout");
  }
  auto points = std::make_shared<Tensor>(grid_points(options));
  auto context = std::make_shared<Tensor>(m.context_latent(*points, Modality::Data));
  auto target = std::make_shared<Tensor>(m.target_latent(*points, Modality::Data));
  const auto offset = options.rule_offset;
  const std::size_t dim = m.input_dim(Modality::Data);
  if (offset.size() != dim) throw DimensionError("synthetic domain: rule offset width mismatch");

  Domain d;
  d.name = "synthetic";
  d.context_bank = m.context_latent(training_inputs, Modality::Data);
  d.decoder = [points, context, target](std::span<const double> z_c, std::span<const double> z_t) {
    Proposal p;
    p.context_latent.assign(z_c.begin(), z_c.end());
    p.target_latent.assign(z_t.begin(), z_t.end());
    p.antecedent_point = points->row_vector(nearest_row(z_c, *context));
    p.consequent_point = points->row_vector(nearest_row(z_t, *target));
    return p;
  };
  d.validator = [offset](const Proposal& p) {
    return synthetic_validity(p.antecedent_point, p.consequent_point, offset);
  };
  d.condition_latent = [&m, dim](const std::string& text) {
    return m.context_latent(Tensor::row(parse_point(text, dim)), Modality::Data).row_vector(0);
  };
  d.outcome_latent = [&m, dim](const std::string& text) {
    return m.target_latent(Tensor::row(parse_point(text, dim)), Modality::Data).row_vector(0);
  };
  return d;
}

double clinical_validity(const rulemine::TransactionIndex& index, const std::vector<std::string>& antecedent,
                         const std::string& consequent, double threshold, double floor) {
  return index.confidence(antecedent, {consequent}) >= threshold ? 1.0 : floor;
}

std::vector<std::string> split_condition(const std::string& text) {
  std::string s = text;
  for (std::size_t at; (at = s.find(" AND ")) != std::string::npos;) s.replace(at, 5, ",");
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

Domain clinical_domain(const model::DualEncoderModel& m, const rulemine::Vocabulary& vocabulary,
                       const rulemine::TransactionIndex& knowledge, const Tensor& training_inputs,
                       const ClinicalDomainOptions& options) {
  if (!m.has_rules()) throw std::logic_error("clinical discovery needs a model with a rule pathway");
  auto antecedents = std::make_shared<TokenDictionary>(restrict(rule_token_dictionary(m, vocabulary, false), false));
  auto consequents = std::make_shared<TokenDictionary>(rule_token_dictionary(m, vocabulary, true));
  const std::size_t k = options.k;
  const bool thresholded = options.median_threshold;

  Domain d;
  d.name = "clinical";
  d.context_bank = m.context_latent(training_inputs, Modality::Data);
  d.decoder = [antecedents, consequents, k, thresholded](std::span<const double> z_c,
                                                           std::span<const double> z_t) {
    const double inf = std::numeric_limits<double>::infinity();
    Proposal p;
    p.context_latent.assign(z_c.begin(), z_c.end());
    p.target_latent.assign(z_t.begin(), z_t.end());
    p.antecedent = decode_latent(z_c, *antecedents, k, thresholded ? antecedents->median_distance : inf);
    p.consequent = decode_latent(z_t, *consequents, k, thresholded ? consequents->median_distance : inf);
    return p;
  };
  d.validator = [&knowledge](const Proposal& p) {
    const auto outcome = risk_token(p.consequent);
    if (!outcome) throw std::runtime_error("no outcome token among the decoded consequents");
    return clinical_validity(knowledge, profile_tokens(p.antecedent), *outcome);
  };
  d.condition_latent = [&m, &vocabulary](const std::string& text) {
    return m.context_latent(multi_hot(split_condition(text), vocabulary), Modality::Rule).row_vector(0);
  };
  d.outcome_latent = [&m, &vocabulary](const std::string& text) {
    return m.target_latent(multi_hot(split_condition(text), vocabulary), Modality::Rule).row_vector(0);
  };
  return d;
}

DecodedProfile translate_patient(const model::DualEncoderModel& m, std::span<const double> x,
                                 const rulemine::Vocabulary& vocabulary, std::size_t k, bool median_threshold) {
  const TokenDictionary dict = rule_token_dictionary(m, vocabulary, true);
  const auto z = m.forward_data(Tensor::row(x)).row_vector(0);
  return decode_latent(z, dict, k,
                       median_threshold ? dict.median_distance : std::numeric_limits<double>::infinity());
}

std::optional<std::string> risk_token(const DecodedProfile& consequent) {
  for (const auto& t : consequent.deduped) {
    if (rulemine::Item::parse(t.token).feature == rulemine::kRiskFeature) return t.token;
  }
  return std::nullopt;
}

std::vector<DiscoveryStep> run_discovery(const model::DualEncoderModel& m, const Domain& domain,
                                         const LangevinConfig& cfg, std::size_t chains, const RngStream& rng,
                                         const std::string& condition, const std::string& outcome) {
  cfg.validate();
  if (chains == 0) throw std::invalid_argument("discovery needs at least one chain");
  if (cfg.mode == LangevinMode::Marginal) {
    RngStream r = rng.substream("marginal");
    return discover_marginal(m, domain.context_bank, cfg, chains, domain.decoder, domain.validator, r);
  }
  const std::vector<double> fixed_c = condition.empty() ? std::vector<double>{} : domain.condition_latent(condition);
  const std::vector<double> fixed_t = outcome.empty() ? std::vector<double>{} : domain.outcome_latent(outcome);
  std::vector<DiscoveryStep> out(chains);
  for (std::size_t i = 0; i < chains; ++i) {
    RngStream r = rng.substream("chain" + std::to_string(i));
    auto z_c = fixed_c.empty() ? sample_latent(r, m.latent_dim()) : fixed_c;
    auto z_t = fixed_t.empty() ? sample_latent(r, m.latent_dim()) : fixed_t;
    DiscoveryStep& s = out[i];
    switch (cfg.mode) {
      case LangevinMode::Joint: s.chain = langevin_joint(m, z_c, z_t, cfg, r); break;
      case LangevinMode::Forward: s.chain = langevin_forward(m, z_c, z_t, cfg, r); break;
      case LangevinMode::Abductive: s.chain = langevin_abductive(m, z_c, z_t, cfg, r); break;
      case LangevinMode::Marginal: break;
    }
    s.proposal = domain.decoder(s.chain.context, s.chain.target);
    try {
      s.score = domain.validator(s.proposal);
    } catch (const std::exception& e) {
      s.diagnostic = e.what();
    }
  }
  return out;
}

nlohmann::json to_json(const DecodedProfile& p) {
  auto list = [](const std::vector<ScoredToken>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : v) a.push_back({{"token", t.token}, {"distance", round6(t.distance)}});
    return a;
  };
  return {{"raw", list(p.raw)}, {"deduped", list(p.deduped)}};
}

nlohmann::json discovery_report(const Domain& domain, const LangevinConfig& cfg,
                                const std::vector<DiscoveryStep>& steps, const std::string& condition,
                                const std::string& outcome) {
  nlohmann::json j;
  j["domain"] = domain.name;
  j["mode"] = to_string(cfg.mode);
  j["config"] = {{"step_size", cfg.step_size},
                 {"temperature", cfg.temperature},
                 {"noise_scale", round6(cfg.noise_scale())},
                 {"iterations", cfg.iterations}};
  if (cfg.clamp) j["config"]["clamp"] = {cfg.clamp->first, cfg.clamp->second};
  j["condition"] = condition;
  j["outcome"] = outcome;
  j["decoder"] = "nearest-neighbour lookup in encoder space; a stand-in, not a learned decoder";
  const bool marginal = cfg.mode == LangevinMode::Marginal;
  std::size_t accepted = 0;
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    nlohmann::json c;
    c["index"] = i;
    c["energy"] = round6(s.chain.energy);
    c["energy_initial"] = s.chain.energy.empty() ? 0.0 : round6(s.chain.energy.front());
    c["energy_final"] = s.chain.energy.empty() ? 0.0 : round6(s.chain.energy.back());
    c["context_latent"] = round6(s.chain.context);
    c["target_latent"] = round6(s.chain.target);
    if (!s.proposal.antecedent_point.empty()) {
      c["antecedent_point"] = round6(s.proposal.antecedent_point);
      c["consequent_point"] = round6(s.proposal.consequent_point);
    } else {
      c["antecedent"] = to_json(s.proposal.antecedent);
      c["consequent"] = to_json(s.proposal.consequent);
    }
    c["score"] = round6(s.score);
    if (marginal) {
      c["acceptance_probability"] = round6(s.acceptance_probability);
      c["accepted"] = s.accepted;
      accepted += s.accepted ? 1 : 0;
    }
    if (!s.diagnostic.empty()) c["diagnostic"] = s.diagnostic;
    list.push_back(std::move(c));
  }
  j["chains"] = std::move(list);
  if (marginal) j["accepted"] = accepted;
  return j;
}

void write_energy_csv(const std::string& path, const std::vector<DiscoveryStep>& steps) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "chain,iteration,energy\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (std::size_t k = 0; k < steps[i].chain.energy.size(); ++k) {
      out << i << ',' << k << ',' << format_number(steps[i].chain.energy[k]) << '\n';
    }
  }
}

}  // namespace rijepa::discover
