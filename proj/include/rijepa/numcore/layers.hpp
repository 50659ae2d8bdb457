#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rijepa/numcore/rng.hpp"
#include "rijepa/numcore/tape.hpp"

namespace rijepa {

inline constexpr double kLayerNormEps = 1e-5;

// How a module's parameters enter the tape: as trainable leaves or as
// constants (frozen inference, EMA targets, Langevin over inputs).
enum class Binding { Trainable, Frozen };

class LinearLayer {
 public:
  LinearLayer() = default;
  // Weights and bias uniform in [-1/sqrt(in), 1/sqrt(in)].
  LinearLayer(std::string name, std::size_t in_dim, std::size_t out_dim, RngStream& rng);
  LinearLayer(std::string name, Tensor weight, Tensor bias);

  std::size_t in_dim() const { return weight_.value().cols(); }
  std::size_t out_dim() const { return weight_.value().rows(); }

  Var forward(Tape& tape, Var x);
  Var forward(Tape& tape, Var x) const;

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  const Parameter& weight() const { return weight_; }
  const Parameter& bias() const { return bias_; }

  void collect(std::vector<Parameter*>& out) { out.insert(out.end(), {&weight_, &bias_}); }
  void collect(std::vector<const Parameter*>& out) const {
    out.insert(out.end(), {&weight_, &bias_});
  }

 private:
  Parameter weight_;
  Parameter bias_;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(std::string name, std::size_t dim, double eps = kLayerNormEps);

  Var forward(Tape& tape, Var x);
  Var forward(Tape& tape, Var x) const;

  Parameter& gain() { return gain_; }
  Parameter& shift() { return shift_; }
  const Parameter& gain() const { return gain_; }
  const Parameter& shift() const { return shift_; }
  double eps() const { return eps_; }

  void collect(std::vector<Parameter*>& out) { out.insert(out.end(), {&gain_, &shift_}); }
  void collect(std::vector<const Parameter*>& out) const {
    out.insert(out.end(), {&gain_, &shift_});
  }

 private:
  Parameter gain_;
  Parameter shift_;
  double eps_ = kLayerNormEps;
};

// Linear → GELU → [LayerNorm] → Linear.
struct MlpSpec {
  std::size_t in_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t out_dim = 0;
  bool layer_norm = false;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

class Mlp {
 public:
  Mlp() = default;
  Mlp(std::string name, const MlpSpec& spec, RngStream& rng);

  const MlpSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }

  Var forward(Tape& tape, Var x, Binding binding);
  Var forward(Tape& tape, Var x) const;  // always frozen
  // Tape-free frozen evaluation.
  Tensor infer(const Tensor& x) const;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;

 private:
  std::string name_;
  MlpSpec spec_;
  LinearLayer in_;
  std::optional<LayerNorm> norm_;
  LinearLayer out_;
};

}  // namespace rijepa
