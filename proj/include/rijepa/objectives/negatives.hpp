#pragma once

#include <array>
#include <string>
#include <vector>

#include "rijepa/numcore/rng.hpp"
#include "rijepa/rulemine/rule.hpp"

namespace rijepa::objectives {

enum class NegativeSource { FlippedConsequent, OodGaussian };

std::string to_string(NegativeSource s);

struct NegativeRuleBatch {
  Tensor antecedents;
  Tensor consequents;
  NegativeSource source = NegativeSource::OodGaussian;
};

struct SyntheticNegativeOptions {
  std::array<double, 3> center_a{-3.0, 3.0, 0.0};
  std::array<double, 3> center_b{3.0, -3.0, 0.0};
  double antecedent_variance = 0.5;
  double offset_variance = 2.0;
  std::array<double, 3> true_offset{1.0, 1.0, 1.0};
  // Offsets closer than this to the true offset are redrawn.
  double exclusion_radius = 1.0;
};

// First ceil(n/2) antecedents around center_a, the rest around center_b;
// consequents A + δ with δ ~ N(0, offset_variance·I) outside the exclusion ball.
NegativeRuleBatch make_negatives_synthetic(RngStream& rng, std::size_t n,
                                           const SyntheticNegativeOptions& options = {});

// One flipped-consequent negative per valid rule.
std::vector<rulemine::RuleTuple> make_negatives_clinical(
    const std::vector<rulemine::RuleTuple>& valid_rules, RngStream& rng);

}  // namespace rijepa::objectives
