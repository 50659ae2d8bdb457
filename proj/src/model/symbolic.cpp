#include "rijepa/model/symbolic.hpp"

#include <cmath>
#include <stdexcept>

#include "rijepa/rulemine/rules.hpp"

namespace rijepa::model {

std::pair<Tensor, Tensor> encode_rule(const rulemine::RuleTuple& rule,
                                      const rulemine::Vocabulary& vocabulary) {
  Tensor ante(1, vocabulary.size());
  Tensor cons(1, vocabulary.size());
  for (const auto& tok : rule.antecedent_tokens()) ante(0, vocabulary.index_of(tok)) = 1.0;
  for (const auto& tok : rule.consequent_tokens()) cons(0, vocabulary.index_of(tok)) = 1.0;
  return {std::move(ante), std::move(cons)};
}

Tensor encode_antecedents(const std::vector<rulemine::RuleTuple>& rules,
                          const rulemine::Vocabulary& vocabulary) {
  Tensor out(rules.size(), vocabulary.size());
  for (std::size_t i = 0; i < rules.size(); ++i)
    for (const auto& tok : rules[i].antecedent_tokens()) out(i, vocabulary.index_of(tok)) = 1.0;
  return out;
}

Tensor encode_consequents(const std::vector<rulemine::RuleTuple>& rules,
                          const rulemine::Vocabulary& vocabulary) {
  Tensor out(rules.size(), vocabulary.size());
  for (std::size_t i = 0; i < rules.size(); ++i)
    for (const auto& tok : rules[i].consequent_tokens()) out(i, vocabulary.index_of(tok)) = 1.0;
  return out;
}

Tensor one_hot(const std::string& token, const rulemine::Vocabulary& vocabulary) {
  Tensor out(1, vocabulary.size());
  out(0, vocabulary.index_of(token)) = 1.0;
  return out;
}

Tensor token_basis(const rulemine::Vocabulary& vocabulary) {
  Tensor out(vocabulary.size(), vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) out(i, i) = 1.0;
  return out;
}

RiskPoles compute_poles(const DualEncoderModel& model, const rulemine::Vocabulary& vocabulary) {
  if (!model.has_rules()) throw std::logic_error("compute_poles: model has no rule pathway");
  return {model.target_latent(one_hot(rulemine::kHighRisk, vocabulary), Modality::Rule).row_vector(0),
          model.target_latent(one_hot(rulemine::kLowRisk, vocabulary), Modality::Rule).row_vector(0)};
}

std::vector<ZeroShotResult> classify_latents(const Tensor& predicted, const RiskPoles& poles) {
  if (predicted.cols() != poles.high.size() || predicted.cols() != poles.low.size()) {
    throw DimensionError("classify_latents: latent width does not match poles");
  }
  std::vector<ZeroShotResult> out(predicted.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& r = out[i];
    r.distance_high = std::sqrt(squared_distance(predicted.row_span(i), poles.high));
    r.distance_low = std::sqrt(squared_distance(predicted.row_span(i), poles.low));
    r.label = r.distance_high < r.distance_low ? 1 : 0;
  }
  return out;
}

std::vector<ZeroShotResult> zero_shot_classify(const DualEncoderModel& model, const Tensor& x,
                                               const RiskPoles& poles) {
  if (!model.has_rules()) {
    throw std::logic_error("zero-shot classification is undefined without a rule pathway");
  }
  return classify_latents(model.forward_data(x), poles);
}

}  // namespace rijepa::model
