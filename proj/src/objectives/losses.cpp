#include "rijepa/objectives/losses.hpp"

#include <stdexcept>
#include <string>

namespace rijepa::objectives {
namespace {

using model::Modality;

Var reduce(Tape& tape, Var x, Reduction r) { return r == Reduction::Sum ? tape.sum(x) : tape.mean(x); }

}  // namespace

Var loss_rbjepa(Tape& tape, Var predicted, Var target, const std::vector<double>& weights) {
  const Tensor& p = tape.value(predicted);
  if (weights.size() != p.rows()) {
    throw DimensionError("loss_rbjepa: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(p.rows()) + " pairs");
  }
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("loss_rbjepa: weights must be non-negative");
  return tape.sum(tape.scale_rows(tape.row_sq_distance(predicted, target), weights));
}

Var loss_jepa_data(Tape& tape, model::DualEncoderModel& m, const Tensor& x_context,
                   const Tensor& x_target, Binding binding) {
  require_same_shape(x_context, x_target, "loss_jepa_data");
  Var pred = m.predict(tape, m.encode_context(tape, tape.constant(x_context), Modality::Data, binding),
                       binding);
  Var tgt = tape.stop_gradient(m.encode_target(tape, tape.constant(x_target), Modality::Data, binding));
  return tape.mean(tape.row_sq_distance(pred, tgt));
}

Var rule_energies(Tape& tape, model::DualEncoderModel& m, const Tensor& antecedents,
                  const Tensor& consequents, Binding binding) {
  if (antecedents.rows() != consequents.rows()) {
    throw DimensionError("rule_energies: " + antecedents.shape_string() + " antecedents vs " +
                         consequents.shape_string() + " consequents");
  }
  Var pred = m.predict(tape, m.encode_context(tape, tape.constant(antecedents), Modality::Rule, binding),
                       binding);
  Var tgt = m.encode_target(tape, tape.constant(consequents), Modality::Rule, binding);
  return tape.row_sq_distance(pred, tgt);
}

Var ebc_from_energies(Tape& tape, Var valid_energy, Var invalid_energy, const EbcOptions& options) {
  if (!(options.margin > 0.0)) throw std::invalid_argument("loss_ebc: margin must be positive");
  if (!(options.invalid_weight >= 0.0)) throw std::invalid_argument("loss_ebc: λ must be non-negative");
  Var pull = reduce(tape, valid_energy, options.reduction);
  Var push = reduce(tape, tape.hinge(invalid_energy, options.margin), options.reduction);
  return tape.add(pull, tape.scale(push, options.invalid_weight));
}

Var loss_ebc(Tape& tape, model::DualEncoderModel& m, const Tensor& valid_antecedents,
             const Tensor& valid_consequents, const Tensor& invalid_antecedents,
             const Tensor& invalid_consequents, const EbcOptions& options, Binding binding) {
  Var valid = rule_energies(tape, m, valid_antecedents, valid_consequents, binding);
  Var invalid = rule_energies(tape, m, invalid_antecedents, invalid_consequents, binding);
  return ebc_from_energies(tape, valid, invalid, options);
}

Var anchor_from_prediction(Tape& tape, Var predicted, const std::vector<int>& labels,
                           const model::RiskPoles& poles) {
  const Tensor& p = tape.value(predicted);
  if (labels.size() != p.rows()) {
    throw DimensionError("loss_anchor: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(p.rows()) + " rows");
  }
  if (poles.high.size() != p.cols() || poles.low.size() != p.cols()) {
    throw DimensionError("loss_anchor: pole width does not match latent width");
  }
  Tensor targets(p.rows(), p.cols());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("loss_anchor: label " + std::to_string(labels[i]) + " is not 0 or 1");
    }
    const auto& pole = labels[i] == 1 ? poles.high : poles.low;
    std::copy(pole.begin(), pole.end(), targets.row_span(i).begin());
  }
  return tape.mean(tape.row_sq_distance(predicted, tape.constant(std::move(targets))));
}

Var loss_anchor(Tape& tape, model::DualEncoderModel& m, const Tensor& x_context,
                const std::vector<int>& labels, const model::RiskPoles& poles, Binding binding) {
  Var pred = m.predict(tape, m.encode_context(tape, tape.constant(x_context), Modality::Data, binding),
                       binding);
  return anchor_from_prediction(tape, pred, labels, poles);
}

Var loss_total(Tape& tape, Var jepa, const Var* ebc, double ebc_weight, const Var* anchor,
               double anchor_weight) {
  if (!(ebc_weight >= 0.0) || !(anchor_weight >= 0.0)) {
    throw std::invalid_argument("loss_total: weights must be non-negative");
  }
  Var total = jepa;
  if (ebc) total = tape.add(total, tape.scale(*ebc, ebc_weight));
  if (anchor) total = tape.add(total, tape.scale(*anchor, anchor_weight));
  return total;
}

}  // namespace rijepa::objectives
