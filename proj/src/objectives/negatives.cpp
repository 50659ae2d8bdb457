#include "rijepa/objectives/negatives.hpp"

#include <cmath>
#include <stdexcept>

#include "rijepa/rulemine/rules.hpp"

namespace rijepa::objectives {

std::string to_string(NegativeSource s) {
  return s == NegativeSource::FlippedConsequent ? "flipped-consequent" : "ood-gaussian";
}

NegativeRuleBatch make_negatives_synthetic(RngStream& rng, std::size_t n,
                                           const SyntheticNegativeOptions& options) {
  if (n == 0) throw std::invalid_argument("make_negatives_synthetic: n must be positive");
  if (options.offset_variance < 0.0 || options.antecedent_variance < 0.0) {
    throw std::invalid_argument("make_negatives_synthetic: variances must be non-negative");
  }
  const std::size_t first = (n + 1) / 2;
  Tensor a1 = sample_gaussian(rng, options.center_a, options.antecedent_variance, first);
  Tensor a2 = sample_gaussian(rng, options.center_b, options.antecedent_variance, n - first);

  NegativeRuleBatch out{Tensor(n, 3), Tensor(n, 3), NegativeSource::OodGaussian};
  std::copy(a1.data().begin(), a1.data().end(), out.antecedents.data().begin());
  std::copy(a2.data().begin(), a2.data().end(), out.antecedents.data().begin() + static_cast<long>(a1.size()));

  const double sd = std::sqrt(options.offset_variance);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 3> delta{};
    int attempts = 0;
    do {
      if (++attempts > 100000) {
        throw std::runtime_error("make_negatives_synthetic: exclusion ball rejects every offset");
      }
      for (double& d : delta) d = sd * rng.normal();
    } while (squared_distance(delta, options.true_offset) <
             options.exclusion_radius * options.exclusion_radius);
    for (std::size_t k = 0; k < 3; ++k) out.consequents(i, k) = out.antecedents(i, k) + delta[k];
  }
  return out;
}

std::vector<rulemine::RuleTuple> make_negatives_clinical(
    const std::vector<rulemine::RuleTuple>& valid_rules, RngStream& rng) {
  if (valid_rules.empty()) throw std::invalid_argument("make_negatives_clinical: empty rule batch");
  std::vector<rulemine::RuleTuple> out;
  out.reserve(valid_rules.size());
  for (const auto& r : valid_rules) out.push_back(rulemine::corrupt_rule(r, rng));
  return out;
}

}  // namespace rijepa::objectives
