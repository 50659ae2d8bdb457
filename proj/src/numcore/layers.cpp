#include "rijepa/numcore/layers.hpp"

#include <cmath>
#include <utility>

namespace rijepa {
namespace {

Tensor uniform_tensor(RngStream& rng, std::size_t rows, std::size_t cols, double bound) {
  Tensor t(rows, cols);
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

LinearLayer::LinearLayer(std::string name, std::size_t in_dim, std::size_t out_dim,
                         RngStream& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  Tensor w = uniform_tensor(rng, out_dim, in_dim, bound);
  Tensor b = uniform_tensor(rng, 1, out_dim, bound);
  weight_ = Parameter(name + ".weight", std::move(w));
  bias_ = Parameter(name + ".bias", std::move(b));
}

LinearLayer::LinearLayer(std::string name, Tensor weight, Tensor bias) {
  if (bias.rows() != 1 || bias.cols() != weight.rows()) {
    throw DimensionError("LinearLayer: bias " + bias.shape_string() + " inconsistent with weight " +
                         weight.shape_string());
  }
  weight_ = Parameter(name + ".weight", std::move(weight));
  bias_ = Parameter(name + ".bias", std::move(bias));
}

Var LinearLayer::forward(Tape& tape, Var x) {
  return tape.linear(x, tape.parameter(weight_), tape.parameter(bias_));
}

Var LinearLayer::forward(Tape& tape, Var x) const {
  return tape.linear(x, tape.frozen(weight_), tape.frozen(bias_));
}

LayerNorm::LayerNorm(std::string name, std::size_t dim, double eps)
    : gain_(name + ".gain", Tensor(1, dim, 1.0)),
      shift_(name + ".shift", Tensor(1, dim, 0.0)),
      eps_(eps) {}

Var LayerNorm::forward(Tape& tape, Var x) {
  return tape.layer_norm(x, tape.parameter(gain_), tape.parameter(shift_), eps_);
}

Var LayerNorm::forward(Tape& tape, Var x) const {
  return tape.layer_norm(x, tape.frozen(gain_), tape.frozen(shift_), eps_);
}

Mlp::Mlp(std::string name, const MlpSpec& spec, RngStream& rng)
    : name_(std::move(name)),
      spec_(spec),
      in_(name_ + ".in", spec.in_dim, spec.hidden_dim, rng),
      out_(name_ + ".out", spec.hidden_dim, spec.out_dim, rng) {
  if (spec.layer_norm) norm_.emplace(name_ + ".norm", spec.hidden_dim);
}

Var Mlp::forward(Tape& tape, Var x, Binding binding) {
  if (binding == Binding::Frozen) return std::as_const(*this).forward(tape, x);
  Var h = tape.gelu(in_.forward(tape, x));
  if (norm_) h = norm_->forward(tape, h);
  return out_.forward(tape, h);
}

Var Mlp::forward(Tape& tape, Var x) const {
  Var h = tape.gelu(in_.forward(tape, x));
  if (norm_) h = norm_->forward(tape, h);
  return out_.forward(tape, h);
}

Tensor Mlp::infer(const Tensor& x) const {
  Tape tape;
  return tape.value(forward(tape, tape.constant(x)));
}

std::vector<Parameter*> Mlp::parameters() {
  std::vector<Parameter*> out;
  in_.collect(out);
  if (norm_) norm_->collect(out);
  out_.collect(out);
  return out;
}

std::vector<const Parameter*> Mlp::parameters() const {
  std::vector<const Parameter*> out;
  in_.collect(out);
  if (norm_) norm_->collect(out);
  out_.collect(out);
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value().size();
  return n;
}

}  // namespace rijepa
