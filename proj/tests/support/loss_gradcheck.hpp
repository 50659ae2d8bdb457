#pragma once

// Finite-difference check of every trainable parameter of a model against
// the tape's gradients for one scalar loss.

#include <functional>
#include <vector>

#include "rijepa/model/model.hpp"
#include "support/gradcheck.hpp"

namespace rijepa::oracle {

using LossBuilder = std::function<Var(Tape&, model::DualEncoderModel&)>;

inline Tensor flatten_grads(const std::vector<Parameter*>& params) {
  std::vector<double> all;
  for (Parameter* p : params) all.insert(all.end(), p->grad().data().begin(), p->grad().data().end());
  return Tensor(1, all.size(), all);
}

// Relative error between analytic and numeric gradients over all trainable
// parameters, concatenated.
inline double model_gradient_error(model::DualEncoderModel& m, const LossBuilder& build,
                                   double h = 1e-4) {
  auto params = m.trainable_parameters();
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(build(tape, m));
  }
  const Tensor analytic = flatten_grads(params);

  auto eval = [&] {
    Tape tape;
    return tape.scalar(build(tape, m));
  };
  std::vector<double> numeric;
  for (Parameter* p : params) {
    const Tensor g = numeric_gradient(eval, p->value(), h);
    numeric.insert(numeric.end(), g.data().begin(), g.data().end());
  }
  return relative_error(analytic, Tensor(1, numeric.size(), numeric));
}

// Small dual-layout model with every dimension ≤ 8.
inline model::ModelSpec small_spec(RngStream& rng, bool layer_norm) {
  model::ModelSpec s;
  s.data_dim = 2 + rng.below(6);
  s.rule_dim = 2 + rng.below(6);
  s.encoder_hidden = 2 + rng.below(6);
  s.latent_dim = 2 + rng.below(6);
  s.predictor_hidden = 2 + rng.below(6);
  s.layer_norm = layer_norm;
  s.layout = model::EncoderLayout::Dual;
  return s;
}

inline Tensor random_tensor(RngStream& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Tensor t(rows, cols);
  for (double& v : t.data()) v = scale * rng.normal();
  return t;
}

}  // namespace rijepa::oracle
