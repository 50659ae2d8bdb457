#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rijepa/model/model.hpp"
#include "rijepa/rulemine/rule.hpp"

namespace rijepa::discover {

// Cached latent of every single-token one-hot.
struct TokenDictionary {
  std::vector<std::string> tokens;
  Tensor latents;  // one row per token
  // Median Euclidean distance over all distinct token pairs.
  double median_distance = 0.0;

  static TokenDictionary build(std::vector<std::string> tokens, Tensor latents);
};

// f_c_rule (context side, for antecedents) or f_t_rule (target side, for
// consequents) applied to each vocabulary token.
TokenDictionary rule_token_dictionary(const model::DualEncoderModel& m,
                                      const rulemine::Vocabulary& vocabulary, bool target_side);

struct ScoredToken {
  std::string token;
  double distance = 0.0;
};

struct DecodedProfile {
  std::vector<ScoredToken> raw;      // k nearest tokens, any feature
  std::vector<ScoredToken> deduped;  // nearest per feature, within max_distance
};

// k nearest tokens to z by Euclidean distance. The deduped list keeps the
// best-ranked token of each feature and drops tokens beyond max_distance.
DecodedProfile decode_latent(std::span<const double> z, const TokenDictionary& dictionary, std::size_t k,
                             double max_distance = std::numeric_limits<double>::infinity());

// Deduped tokens as items, sorted by feature.
std::vector<rulemine::Item> profile_items(const DecodedProfile& profile);

// Nearest raw point by latent distance; used where "tokens" are points of a
// continuous input space.
struct PointDictionary {
  Tensor points;   // raw inputs
  Tensor latents;  // encoder outputs for those inputs
};

std::size_t nearest_row(std::span<const double> z, const Tensor& latents);

}  // namespace rijepa::discover
