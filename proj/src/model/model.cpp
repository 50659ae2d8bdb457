#include "rijepa/model/model.hpp"

#include <cstring>
#include <stdexcept>
#include <utility>

#include "rijepa/numcore/optim.hpp"

namespace rijepa::model {
namespace {

void copy_values(Mlp& dst, const Mlp& src) {
  auto d = dst.parameters();
  auto s = src.parameters();
  for (std::size_t i = 0; i < d.size(); ++i) d[i]->value() = s[i]->value();
}

void append(std::vector<Parameter*>& out, Mlp& m) {
  for (Parameter* p : m.parameters()) out.push_back(p);
}

}  // namespace

ModelSpec ModelSpec::synthetic(bool with_rules) {
  return {3, with_rules ? 3u : 0u, 32, 16, 32, false, EncoderLayout::Unified};
}

ModelSpec ModelSpec::clinical(std::size_t data_dim, std::size_t vocabulary_size, bool with_rules) {
  return {data_dim, with_rules ? vocabulary_size : 0u, 64, 32, 64, true, EncoderLayout::Dual};
}

void ModelSpec::validate() const {
  if (data_dim == 0 || encoder_hidden == 0 || latent_dim == 0 || predictor_hidden == 0) {
    throw std::invalid_argument("ModelSpec: every dimension must be positive");
  }
  if (layout == EncoderLayout::Unified && rule_dim != 0 && rule_dim != data_dim) {
    throw std::invalid_argument("ModelSpec: unified layout needs rule_dim == data_dim");
  }
}

nlohmann::json to_json(const ModelSpec& spec) {
  return {{"data_dim", spec.data_dim},
          {"rule_dim", spec.rule_dim},
          {"encoder_hidden", spec.encoder_hidden},
          {"latent_dim", spec.latent_dim},
          {"predictor_hidden", spec.predictor_hidden},
          {"layer_norm", spec.layer_norm},
          {"layout", spec.layout == EncoderLayout::Unified ? "unified" : "dual"}};
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec s;
  s.data_dim = j.at("data_dim").get<std::size_t>();
  s.rule_dim = j.at("rule_dim").get<std::size_t>();
  s.encoder_hidden = j.at("encoder_hidden").get<std::size_t>();
  s.latent_dim = j.at("latent_dim").get<std::size_t>();
  s.predictor_hidden = j.at("predictor_hidden").get<std::size_t>();
  s.layer_norm = j.at("layer_norm").get<bool>();
  const auto layout = j.at("layout").get<std::string>();
  if (layout == "unified") s.layout = EncoderLayout::Unified;
  else if (layout == "dual") s.layout = EncoderLayout::Dual;
  else throw std::invalid_argument("unknown encoder layout '" + layout + "'");
  s.validate();
  return s;
}

DualEncoderModel::DualEncoderModel(const ModelSpec& spec, const RngStream& master) : spec_(spec) {
  spec_.validate();
  const MlpSpec data_enc{spec.data_dim, spec.encoder_hidden, spec.latent_dim, spec.layer_norm};
  const MlpSpec pred{spec.latent_dim, spec.predictor_hidden, spec.latent_dim, spec.layer_norm};
  const bool unified = spec.layout == EncoderLayout::Unified;

  RngStream init = master.substream("init");
  context_data_ = Mlp(unified ? "f_c" : "f_c_data", data_enc, init);
  predictor_ = Mlp("g", pred, init);
  // Target starts as a copy of the context encoder; the draws are discarded.
  RngStream scratch(0);
  target_data_ = Mlp(unified ? "f_t" : "f_t_data", data_enc, scratch);
  copy_values(target_data_, context_data_);

  if (spec.has_rules() && !unified) {
    RngStream rule_init = master.substream("init.rule");
    const MlpSpec rule_enc{spec.rule_dim, spec.encoder_hidden, spec.latent_dim, spec.layer_norm};
    context_rule_.emplace("f_c_rule", rule_enc, rule_init);
    target_rule_.emplace("f_t_rule", rule_enc, rule_init);
  }
}

std::size_t DualEncoderModel::input_dim(Modality m) const {
  if (m == Modality::Data) return spec_.data_dim;
  if (!has_rules()) throw std::logic_error("model has no rule pathway");
  return spec_.rule_dim;
}

Mlp& DualEncoderModel::context_encoder(Modality m) {
  return const_cast<Mlp&>(std::as_const(*this).context_encoder(m));
}

const Mlp& DualEncoderModel::context_encoder(Modality m) const {
  if (m == Modality::Data) return context_data_;
  if (!has_rules()) throw std::logic_error("model has no rule pathway");
  return context_rule_ ? *context_rule_ : context_data_;
}

Mlp& DualEncoderModel::target_encoder(Modality m) {
  return const_cast<Mlp&>(std::as_const(*this).target_encoder(m));
}

const Mlp& DualEncoderModel::target_encoder(Modality m) const {
  if (m == Modality::Data) return target_data_;
  if (!has_rules()) throw std::logic_error("model has no rule pathway");
  return target_rule_ ? *target_rule_ : target_data_;
}

Var DualEncoderModel::encode_context(Tape& tape, Var x, Modality m, Binding b) {
  return context_encoder(m).forward(tape, x, b);
}

Var DualEncoderModel::encode_target(Tape& tape, Var x, Modality m, Binding b) {
  Mlp& enc = target_encoder(m);
  // The EMA shadow is never a gradient target.
  if (&enc == &target_data_) return std::as_const(enc).forward(tape, x);
  return enc.forward(tape, x, b);
}

Var DualEncoderModel::predict(Tape& tape, Var z, Binding b) { return predictor_.forward(tape, z, b); }

Tensor DualEncoderModel::context_latent(const Tensor& x, Modality m) const {
  return context_encoder(m).infer(x);
}

Tensor DualEncoderModel::target_latent(const Tensor& x, Modality m) const {
  return target_encoder(m).infer(x);
}

Tensor DualEncoderModel::predict(const Tensor& z) const {
  if (z.cols() != spec_.latent_dim) {
    throw DimensionError("predict: latent " + z.shape_string() + " but latent_dim " +
                         std::to_string(spec_.latent_dim));
  }
  return predictor_.infer(z);
}

Tensor DualEncoderModel::forward_data(const Tensor& x) const {
  if (x.cols() != spec_.data_dim) {
    throw DimensionError("forward_data: input " + x.shape_string() + " but data_dim " +
                         std::to_string(spec_.data_dim));
  }
  return predict(context_latent(x, Modality::Data));
}

Tensor DualEncoderModel::forward_rule(const Tensor& antecedent) const {
  if (antecedent.cols() != input_dim(Modality::Rule)) {
    throw DimensionError("forward_rule: input " + antecedent.shape_string() + " but rule_dim " +
                         std::to_string(spec_.rule_dim));
  }
  return predict(context_latent(antecedent, Modality::Rule));
}

std::vector<double> DualEncoderModel::energy(const Tensor& context, const Tensor& target,
                                             EnergyPair pair) const {
  if (context.rows() != target.rows()) {
    throw DimensionError("energy: " + context.shape_string() + " contexts vs " +
                         target.shape_string() + " targets");
  }
  const Modality cm = pair == EnergyPair::RuleToRule ? Modality::Rule : Modality::Data;
  const Modality tm = pair == EnergyPair::DataToData ? Modality::Data : Modality::Rule;
  const Tensor pred = cm == Modality::Data ? forward_data(context) : forward_rule(context);
  if (target.cols() != input_dim(tm)) {
    throw DimensionError("energy: target " + target.shape_string() + " has wrong width");
  }
  const Tensor tgt = target_latent(target, tm);
  std::vector<double> out(context.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = squared_distance(pred.row_span(i), tgt.row_span(i));
  return out;
}

std::vector<Parameter*> DualEncoderModel::trainable_parameters() {
  std::vector<Parameter*> out;
  append(out, context_data_);
  append(out, predictor_);
  if (context_rule_) append(out, *context_rule_);
  if (target_rule_) append(out, *target_rule_);
  return out;
}

std::vector<Parameter*> DualEncoderModel::data_target_parameters() { return target_data_.parameters(); }

std::vector<const Parameter*> DualEncoderModel::data_target_parameters() const {
  return target_data_.parameters();
}

std::vector<const Parameter*> DualEncoderModel::data_context_parameters() const {
  return context_data_.parameters();
}

std::vector<Parameter*> DualEncoderModel::all_parameters() {
  auto out = trainable_parameters();
  append(out, target_data_);
  return out;
}

std::vector<const Parameter*> DualEncoderModel::all_parameters() const {
  std::vector<const Parameter*> out;
  for (Parameter* p : const_cast<DualEncoderModel*>(this)->all_parameters()) out.push_back(p);
  return out;
}

std::size_t DualEncoderModel::data_pathway_parameter_count() const {
  return context_data_.parameter_count() + target_data_.parameter_count() +
         predictor_.parameter_count();
}

void DualEncoderModel::update_target(double tau) {
  ema_update(target_data_.parameters(), std::as_const(context_data_).parameters(), tau);
}

Tensor mask_context(const Tensor& x, double p_mask, RngStream& rng) {
  if (!(p_mask >= 0.0) || p_mask >= 1.0) throw std::invalid_argument("mask_context: p_mask must lie in [0, 1)");
  Tensor out = x;
  for (double& v : out.data())
    if (rng.uniform() < p_mask) v = 0.0;
  return out;
}

std::uint64_t parameter_checksum(const DualEncoderModel& model) {
  std::uint64_t h = 1469598103934665603ull;
  for (const Parameter* p : model.all_parameters()) {
    for (double v : p->value().data()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof v);
      for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

}  // namespace rijepa::model
