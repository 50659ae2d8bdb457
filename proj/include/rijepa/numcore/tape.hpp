#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rijepa/numcore/tensor.hpp"

namespace rijepa {

// Raised on misuse of the tape (backward without a recorded forward, foreign
// handles, non-scalar loss).
class TapeUsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A named trainable tensor with its gradient accumulator.
class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Tensor value);

  const std::string& name() const { return name_; }
  Tensor& value() { return value_; }
  const Tensor& value() const { return value_; }
  Tensor& grad() { return grad_; }
  const Tensor& grad() const { return grad_; }
  void zero_grad() { grad_.fill(0.0); }

 private:
  std::string name_;
  Tensor value_;
  Tensor grad_;
};

// Handle to a node recorded on a Tape.
struct Var {
  std::uint64_t tape_id = 0;
  std::size_t index = 0;
};

// Records a forward computation and replays it in reverse to accumulate
// gradients. Nodes created by constant(), frozen() and stop_gradient() are
// boundaries: nothing upstream of them receives gradient.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf whose gradient is kept and can be read with grad() after backward.
  Var input(Tensor value);
  // Trainable leaf; backward() adds into p.grad().
  Var parameter(Parameter& p);
  // Parameter value as a constant (no gradient flows to it).
  Var frozen(const Parameter& p);
  Var stop_gradient(Var x);

  // x·Wᵀ + b with x (n×in), W (out×in), b (1×out).
  Var linear(Var x, Var weight, Var bias);
  Var gelu(Var x);
  Var layer_norm(Var x, Var gain, Var shift, double eps);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var x, double factor);
  // (n×d) → (n×1) of row-wise squared L2 norms.
  Var row_sq_norm(Var x);
  Var row_sq_distance(Var a, Var b) { return row_sq_norm(sub(a, b)); }
  // Elementwise max(0, margin − x).
  Var hinge(Var x, double margin);
  // Row i scaled by weights[i].
  Var scale_rows(Var x, std::vector<double> weights);
  Var sum(Var x);
  Var mean(Var x);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;
  double scalar(Var v) const;
  bool requires_grad(Var v) const;

  void backward(Var loss);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool keep_grad = false;
    Parameter* param = nullptr;
    std::vector<std::size_t> inputs;
    std::function<void(Tape&, std::size_t)> backward;
  };

  Var push(Node node);
  Node& node(Var v);
  const Node& node(Var v) const;
  Tensor& grad_of(std::size_t index);

  std::uint64_t id_;
  std::vector<Node> nodes_;
};

double gelu_value(double x);
double gelu_derivative(double x);

}  // namespace rijepa
