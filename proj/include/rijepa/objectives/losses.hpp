#pragma once

#include <span>
#include <vector>

#include "rijepa/model/model.hpp"
#include "rijepa/model/symbolic.hpp"
#include "rijepa/numcore/tape.hpp"

namespace rijepa::objectives {

// Sum over the batch (full-batch synthetic runs) or mean (minibatch clinical runs).
enum class Reduction { Sum, Mean };

struct EbcOptions {
  double margin = 5.0;
  double invalid_weight = 1.0;  // λ
  Reduction reduction = Reduction::Sum;
};

// Σ_i w_i ‖pred_i − target_i‖².
Var loss_rbjepa(Tape& tape, Var predicted, Var target, const std::vector<double>& weights);

// Mean over rows of ‖g(f_c_data(x_c)) − f_t_data(x_t)‖²; the target side is
// the EMA shadow and carries no gradient.
Var loss_jepa_data(Tape& tape, model::DualEncoderModel& m, const Tensor& x_context,
                   const Tensor& x_target, Binding binding = Binding::Trainable);

// Row-wise energies ‖g(f_c(A)) − f_t(C)‖² (n×1) for rule pairs. Context and
// target encoders are the rule ones (shared with data in the unified layout).
Var rule_energies(Tape& tape, model::DualEncoderModel& m, const Tensor& antecedents,
                  const Tensor& consequents, Binding binding = Binding::Trainable);

// reduce(E_valid) + λ·reduce(max(0, m − E_invalid)).
Var loss_ebc(Tape& tape, model::DualEncoderModel& m, const Tensor& valid_antecedents,
             const Tensor& valid_consequents, const Tensor& invalid_antecedents,
             const Tensor& invalid_consequents, const EbcOptions& options,
             Binding binding = Binding::Trainable);

// Same combination from precomputed energy columns.
Var ebc_from_energies(Tape& tape, Var valid_energy, Var invalid_energy, const EbcOptions& options);

// Mean of y‖ẑ − z_high‖² + (1 − y)‖ẑ − z_low‖² with ẑ = g(f_c_data(x_c)).
// Poles enter as constants. Labels must be 0 or 1.
Var loss_anchor(Tape& tape, model::DualEncoderModel& m, const Tensor& x_context,
                const std::vector<int>& labels, const model::RiskPoles& poles,
                Binding binding = Binding::Trainable);

// Same, for an already predicted latent batch.
Var anchor_from_prediction(Tape& tape, Var predicted, const std::vector<int>& labels,
                           const model::RiskPoles& poles);

struct LossComponents {
  double jepa = 0.0;
  double ebc = 0.0;
  double anchor = 0.0;
  double total = 0.0;
};

// jepa + ebc_weight·ebc + anchor_weight·anchor. Absent terms are skipped.
Var loss_total(Tape& tape, Var jepa, const Var* ebc, double ebc_weight, const Var* anchor,
               double anchor_weight);

}  // namespace rijepa::objectives
