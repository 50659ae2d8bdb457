#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rijepa/model/model.hpp"
#include "rijepa/rulemine/rule.hpp"

namespace rijepa::model {

// Antecedent as a multi-hot row, consequent as a one-hot row, both over the
// vocabulary's sorted token order. An empty antecedent is the null rule.
std::pair<Tensor, Tensor> encode_rule(const rulemine::RuleTuple& rule,
                                      const rulemine::Vocabulary& vocabulary);

// One row per rule.
Tensor encode_antecedents(const std::vector<rulemine::RuleTuple>& rules,
                          const rulemine::Vocabulary& vocabulary);
Tensor encode_consequents(const std::vector<rulemine::RuleTuple>& rules,
                          const rulemine::Vocabulary& vocabulary);

Tensor one_hot(const std::string& token, const rulemine::Vocabulary& vocabulary);
// Identity matrix: row i is the one-hot of vocabulary token i.
Tensor token_basis(const rulemine::Vocabulary& vocabulary);

// Outcome coordinates f_t_rule(one_hot(target_risk=1.0 / 0.0)).
struct RiskPoles {
  std::vector<double> high;
  std::vector<double> low;
};

RiskPoles compute_poles(const DualEncoderModel& model, const rulemine::Vocabulary& vocabulary);

struct ZeroShotResult {
  int label = 0;
  double distance_high = 0.0;
  double distance_low = 0.0;
};

// Nearest pole to each predicted latent; ties go to low risk.
std::vector<ZeroShotResult> classify_latents(const Tensor& predicted, const RiskPoles& poles);
// classify_latents(g(f_c_data(x))). Refuses models without a rule pathway.
std::vector<ZeroShotResult> zero_shot_classify(const DualEncoderModel& model, const Tensor& x,
                                               const RiskPoles& poles);

}  // namespace rijepa::model
