#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/numcore/layers.hpp"
#include "rijepa/numcore/rng.hpp"

namespace rijepa::model {

// Unified: one context and one target encoder shared by data and rules (the
// rule inputs live in the data space). Dual: separate data and rule encoders.
enum class EncoderLayout { Unified, Dual };

enum class Modality { Data, Rule };

// Which encoders score a (context, target) pair.
enum class EnergyPair { DataToData, RuleToRule, DataToRule };

struct ModelSpec {
  std::size_t data_dim = 0;
  // Rule input width (vocabulary size in dual layout). 0 disables the rule
  // pathway, which gives the Classic JEPA baseline.
  std::size_t rule_dim = 0;
  std::size_t encoder_hidden = 0;
  std::size_t latent_dim = 0;
  std::size_t predictor_hidden = 0;
  bool layer_norm = false;
  EncoderLayout layout = EncoderLayout::Dual;

  // 3 → 32 → 16 encoders, 16 → 32 → 16 predictor, no normalization.
  static ModelSpec synthetic(bool with_rules);
  // d → 64 → LN → 32 encoders, 32 → 64 → LN → 32 predictor.
  static ModelSpec clinical(std::size_t data_dim, std::size_t vocabulary_size, bool with_rules);

  bool has_rules() const { return rule_dim > 0; }
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

// Context encoders, target encoders and the single shared predictor g.
// The data target encoder is never trained by gradient: it enters every tape
// frozen and moves only through update_target().
class DualEncoderModel {
 public:
  // Data pathway initialised from master.substream("init"), rule encoders
  // from master.substream("init.rule"); the two never share draws, so a
  // model with and without rules starts from the same data pathway.
  DualEncoderModel(const ModelSpec& spec, const RngStream& master);

  DualEncoderModel(const DualEncoderModel&) = default;
  DualEncoderModel& operator=(const DualEncoderModel&) = default;

  const ModelSpec& spec() const { return spec_; }
  bool has_rules() const { return spec_.has_rules(); }
  std::size_t latent_dim() const { return spec_.latent_dim; }
  std::size_t input_dim(Modality m) const;

  Mlp& context_encoder(Modality m);
  const Mlp& context_encoder(Modality m) const;
  Mlp& target_encoder(Modality m);
  const Mlp& target_encoder(Modality m) const;
  Mlp& predictor() { return predictor_; }
  const Mlp& predictor() const { return predictor_; }

  // Tape builders. encode_target for Data is always frozen.
  Var encode_context(Tape& tape, Var x, Modality m, Binding b);
  Var encode_target(Tape& tape, Var x, Modality m, Binding b);
  Var predict(Tape& tape, Var z, Binding b);

  // Frozen inference; safe to call concurrently.
  Tensor context_latent(const Tensor& x, Modality m) const;
  Tensor target_latent(const Tensor& x, Modality m) const;
  Tensor predict(const Tensor& z) const;
  // g(f_c_data(x)).
  Tensor forward_data(const Tensor& x) const;
  // g(f_c_rule(antecedent)).
  Tensor forward_rule(const Tensor& antecedent) const;
  // Row-wise ‖g(f_c(context)) − f_t(target)‖² under the chosen encoders.
  std::vector<double> energy(const Tensor& context, const Tensor& target, EnergyPair pair) const;

  // Everything updated by the optimizer: f_c_data, g, then f_c_rule and
  // f_t_rule in the dual layout.
  std::vector<Parameter*> trainable_parameters();
  std::vector<Parameter*> data_target_parameters();
  std::vector<const Parameter*> data_target_parameters() const;
  std::vector<const Parameter*> data_context_parameters() const;
  // Every parameter, trainable first, for checkpoints and checksums.
  std::vector<Parameter*> all_parameters();
  std::vector<const Parameter*> all_parameters() const;
  // f_c_data + f_t_data + g.
  std::size_t data_pathway_parameter_count() const;

  // θ_t_data ← τ·θ_t_data + (1 − τ)·θ_c_data.
  void update_target(double tau);

 private:
  ModelSpec spec_;
  Mlp context_data_;
  Mlp target_data_;
  Mlp predictor_;
  std::optional<Mlp> context_rule_;
  std::optional<Mlp> target_rule_;
};

// Each feature independently zeroed with probability p_mask.
Tensor mask_context(const Tensor& x, double p_mask, RngStream& rng);

// Order-sensitive FNV-1a hash over every parameter's bytes.
std::uint64_t parameter_checksum(const DualEncoderModel& model);

}  // namespace rijepa::model
