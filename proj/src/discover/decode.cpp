#include "rijepa/discover/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rijepa/model/symbolic.hpp"

namespace rijepa::discover {

TokenDictionary TokenDictionary::build(std::vector<std::string> tokens, Tensor latents) {
  if (tokens.empty()) throw std::invalid_argument("token dictionary is empty");
  if (tokens.size() != latents.rows()) throw DimensionError("token dictionary: token/latent count mismatch");
  std::vector<double> d;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    for (std::size_t j = i + 1; j < tokens.size(); ++j)
      d.push_back(std::sqrt(squared_distance(latents.row_span(i), latents.row_span(j))));
  double median = 0.0;
  if (!d.empty()) {
    std::sort(d.begin(), d.end());
    median = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  }
  return {std::move(tokens), std::move(latents), median};
}

TokenDictionary rule_token_dictionary(const model::DualEncoderModel& m,
                                      const rulemine::Vocabulary& vocabulary, bool target_side) {
  const Tensor basis = model::token_basis(vocabulary);
  Tensor latents = target_side ? m.target_latent(basis, model::Modality::Rule)
                               : m.context_latent(basis, model::Modality::Rule);
  return TokenDictionary::build(vocabulary.tokens(), std::move(latents));
}

DecodedProfile decode_latent(std::span<const double> z, const TokenDictionary& dictionary, std::size_t k,
                             double max_distance) {
  if (dictionary.tokens.empty()) throw std::invalid_argument("decode_latent: empty dictionary");
  if (z.size() != dictionary.latents.cols()) throw DimensionError("decode_latent: latent width mismatch");
  std::vector<ScoredToken> all(dictionary.tokens.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = {dictionary.tokens[i], std::sqrt(squared_distance(z, dictionary.latents.row_span(i)))};
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ScoredToken& a, const ScoredToken& b) { return a.distance < b.distance; });
  DecodedProfile out;
  out.raw.assign(all.begin(), all.begin() + static_cast<long>(std::min(k, all.size())));
  std::set<std::string> features;
  for (const auto& t : out.raw) {
    if (t.distance > max_distance) continue;
    if (features.insert(rulemine::Item::parse(t.token).feature).second) out.deduped.push_back(t);
  }
  return out;
}

std::vector<rulemine::Item> profile_items(const DecodedProfile& profile) {
  std::vector<rulemine::Item> items;
  for (const auto& t : profile.deduped) items.push_back(rulemine::Item::parse(t.token));
  std::sort(items.begin(), items.end());
  return items;
}

std::size_t nearest_row(std::span<const double> z, const Tensor& latents) {
  if (latents.rows() == 0) throw std::invalid_argument("nearest_row: empty dictionary");
  std::size_t best = 0;
  double best_d = squared_distance(z, latents.row_span(0));
  for (std::size_t i = 1; i < latents.rows(); ++i) {
    const double d = squared_distance(z, latents.row_span(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace rijepa::discover
