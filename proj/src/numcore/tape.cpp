#include "rijepa/numcore/tape.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace rijepa {
namespace {

std::atomic<std::uint64_t> g_next_tape_id{1};

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

Parameter::Parameter(std::string name, Tensor value)
    : name_(std::move(name)), value_(std::move(value)), grad_(Tensor::zeros_like(value_)) {}

Tape::Tape() : id_(g_next_tape_id.fetch_add(1)) {}

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{id_, nodes_.size() - 1};
}

Tape::Node& Tape::node(Var v) {
  if (v.tape_id != id_ || v.index >= nodes_.size()) {
    throw TapeUsageError("variable was not recorded on this tape");
  }
  return nodes_[v.index];
}

const Tape::Node& Tape::node(Var v) const {
  if (v.tape_id != id_ || v.index >= nodes_.size()) {
    throw TapeUsageError("variable was not recorded on this tape");
  }
  return nodes_[v.index];
}

Tensor& Tape::grad_of(std::size_t index) {
  Node& n = nodes_[index];
  if (n.grad.size() != n.value.size() || !n.grad.same_shape(n.value)) {
    n.grad = Tensor::zeros_like(n.value);
  }
  return n.grad;
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

const Tensor& Tape::grad(Var v) const {
  const Node& n = node(v);
  if (!n.keep_grad && n.param == nullptr && !n.requires_grad) {
    throw TapeUsageError("gradient requested for a node outside the differentiable graph");
  }
  return n.grad;
}

double Tape::scalar(Var v) const {
  const Tensor& t = value(v);
  if (t.size() != 1) throw TapeUsageError("scalar(): node is " + t.shape_string());
  return t[0];
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::input(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  n.keep_grad = true;
  return push(std::move(n));
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.value = p.value();
  n.requires_grad = true;
  n.param = &p;
  return push(std::move(n));
}

Var Tape::frozen(const Parameter& p) { return constant(p.value()); }

Var Tape::stop_gradient(Var x) { return constant(node(x).value); }

Var Tape::linear(Var x, Var weight, Var bias) {
  const Tensor& X = node(x).value;
  const Tensor& W = node(weight).value;
  const Tensor& B = node(bias).value;
  if (X.cols() != W.cols()) {
    throw DimensionError("linear: input has " + std::to_string(X.cols()) +
                         " columns, layer expects " + std::to_string(W.cols()));
  }
  if (B.rows() != 1 || B.cols() != W.rows()) throw DimensionError("linear: bias shape");

  const std::size_t n = X.rows(), in = X.cols(), out = W.rows();
  Tensor Y(n, out);
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = X.data().data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = W.data().data() + o * in;
      double acc = B[o];
      for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wo[i];
      Y(r, o) = acc;
    }
  }

  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index, weight.index, bias.index};
  nd.requires_grad =
      node(x).requires_grad || node(weight).requires_grad || node(bias).requires_grad;
  nd.backward = [n, in, out](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    const std::size_t xi = t.nodes_[self].inputs[0];
    const std::size_t wi = t.nodes_[self].inputs[1];
    const std::size_t bi = t.nodes_[self].inputs[2];
    const Tensor& X = t.nodes_[xi].value;
    const Tensor& W = t.nodes_[wi].value;
    if (t.nodes_[xi].requires_grad) {
      Tensor& dX = t.grad_of(xi);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t o = 0; o < out; ++o) {
          const double g = dY(r, o);
          if (g == 0.0) continue;
          for (std::size_t i = 0; i < in; ++i) dX(r, i) += g * W(o, i);
        }
    }
    if (t.nodes_[wi].requires_grad) {
      Tensor& dW = t.grad_of(wi);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t o = 0; o < out; ++o) {
          const double g = dY(r, o);
          if (g == 0.0) continue;
          for (std::size_t i = 0; i < in; ++i) dW(o, i) += g * X(r, i);
        }
    }
    if (t.nodes_[bi].requires_grad) {
      Tensor& dB = t.grad_of(bi);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t o = 0; o < out; ++o) dB[o] += dY(r, o);
    }
  };
  return push(std::move(nd));
}

Var Tape::gelu(Var x) {
  const Tensor& X = node(x).value;
  Tensor Y = Tensor::zeros_like(X);
  for (std::size_t i = 0; i < X.size(); ++i) Y[i] = gelu_value(X[i]);
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index};
  nd.requires_grad = node(x).requires_grad;
  nd.backward = [](Tape& t, std::size_t self) {
    const std::size_t xi = t.nodes_[self].inputs[0];
    const Tensor& X = t.nodes_[xi].value;
    const Tensor& dY = t.nodes_[self].grad;
    Tensor& dX = t.grad_of(xi);
    for (std::size_t i = 0; i < X.size(); ++i) dX[i] += dY[i] * gelu_derivative(X[i]);
  };
  return push(std::move(nd));
}

Var Tape::layer_norm(Var x, Var gain, Var shift, double eps) {
  const Tensor& X = node(x).value;
  const Tensor& G = node(gain).value;
  const Tensor& S = node(shift).value;
  const std::size_t n = X.rows(), d = X.cols();
  if (G.size() != d || S.size() != d) throw DimensionError("layer_norm: gain/shift length");
  if (!(eps > 0.0)) throw std::invalid_argument("layer_norm: eps must be positive");

  Tensor normed(n, d);
  std::vector<double> inv_std(n);
  Tensor Y(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < d; ++c) mu += X(r, c);
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = X(r, c) - mu;
      var += dv * dv;
    }
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) {
      normed(r, c) = (X(r, c) - mu) * inv_std[r];
      Y(r, c) = normed(r, c) * G[c] + S[c];
    }
  }

  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index, gain.index, shift.index};
  nd.requires_grad =
      node(x).requires_grad || node(gain).requires_grad || node(shift).requires_grad;
  nd.backward = [n, d, normed = std::move(normed), inv_std = std::move(inv_std)](
                    Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    const std::size_t xi = t.nodes_[self].inputs[0];
    const std::size_t gi = t.nodes_[self].inputs[1];
    const std::size_t si = t.nodes_[self].inputs[2];
    const Tensor& G = t.nodes_[gi].value;
    if (t.nodes_[gi].requires_grad) {
      Tensor& dG = t.grad_of(gi);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) dG[c] += dY(r, c) * normed(r, c);
    }
    if (t.nodes_[si].requires_grad) {
      Tensor& dS = t.grad_of(si);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) dS[c] += dY(r, c);
    }
    if (t.nodes_[xi].requires_grad) {
      Tensor& dX = t.grad_of(xi);
      const double dd = static_cast<double>(d);
      for (std::size_t r = 0; r < n; ++r) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double g = dY(r, c) * G[c];
          sum_g += g;
          sum_gx += g * normed(r, c);
        }
        for (std::size_t c = 0; c < d; ++c) {
          const double g = dY(r, c) * G[c];
          dX(r, c) += inv_std[r] / dd * (dd * g - sum_g - normed(r, c) * sum_gx);
        }
      }
    }
  };
  return push(std::move(nd));
}

Var Tape::add(Var a, Var b) {
  const Tensor& A = node(a).value;
  const Tensor& B = node(b).value;
  require_same_shape(A, B, "add");
  Tensor Y = A;
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] += B[i];
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {a.index, b.index};
  nd.requires_grad = node(a).requires_grad || node(b).requires_grad;
  nd.backward = [](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    for (std::size_t k = 0; k < 2; ++k) {
      const std::size_t in = t.nodes_[self].inputs[k];
      if (!t.nodes_[in].requires_grad) continue;
      Tensor& g = t.grad_of(in);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += dY[i];
    }
  };
  return push(std::move(nd));
}

Var Tape::sub(Var a, Var b) {
  const Tensor& A = node(a).value;
  const Tensor& B = node(b).value;
  require_same_shape(A, B, "sub");
  Tensor Y = A;
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] -= B[i];
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {a.index, b.index};
  nd.requires_grad = node(a).requires_grad || node(b).requires_grad;
  nd.backward = [](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    const std::size_t ai = t.nodes_[self].inputs[0];
    const std::size_t bi = t.nodes_[self].inputs[1];
    if (t.nodes_[ai].requires_grad) {
      Tensor& g = t.grad_of(ai);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += dY[i];
    }
    if (t.nodes_[bi].requires_grad) {
      Tensor& g = t.grad_of(bi);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= dY[i];
    }
  };
  return push(std::move(nd));
}

Var Tape::scale(Var x, double factor) {
  Tensor Y = node(x).value;
  for (double& v : Y.data()) v *= factor;
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index};
  nd.requires_grad = node(x).requires_grad;
  nd.backward = [factor](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    Tensor& g = t.grad_of(t.nodes_[self].inputs[0]);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * dY[i];
  };
  return push(std::move(nd));
}

Var Tape::row_sq_norm(Var x) {
  const Tensor& X = node(x).value;
  Tensor Y(X.rows(), 1);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    double s = 0.0;
    for (double v : X.row_span(r)) s += v * v;
    Y[r] = s;
  }
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index};
  nd.requires_grad = node(x).requires_grad;
  nd.backward = [](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    const std::size_t xi = t.nodes_[self].inputs[0];
    const Tensor& X = t.nodes_[xi].value;
    Tensor& dX = t.grad_of(xi);
    for (std::size_t r = 0; r < X.rows(); ++r)
      for (std::size_t c = 0; c < X.cols(); ++c) dX(r, c) += 2.0 * X(r, c) * dY[r];
  };
  return push(std::move(nd));
}

Var Tape::hinge(Var x, double margin) {
  const Tensor& X = node(x).value;
  Tensor Y = Tensor::zeros_like(X);
  for (std::size_t i = 0; i < X.size(); ++i) Y[i] = std::max(0.0, margin - X[i]);
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index};
  nd.requires_grad = node(x).requires_grad;
  nd.backward = [margin](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    const std::size_t xi = t.nodes_[self].inputs[0];
    const Tensor& X = t.nodes_[xi].value;
    Tensor& dX = t.grad_of(xi);
    // Inactive hinge (x >= margin) passes exactly zero.
    for (std::size_t i = 0; i < X.size(); ++i)
      if (X[i] < margin) dX[i] -= dY[i];
  };
  return push(std::move(nd));
}

Var Tape::scale_rows(Var x, std::vector<double> weights) {
  const Tensor& X = node(x).value;
  if (weights.size() != X.rows()) {
    throw DimensionError("scale_rows: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(X.rows()) + " rows");
  }
  Tensor Y = X;
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (double& v : Y.row_span(r)) v *= weights[r];
  Node nd;
  nd.value = std::move(Y);
  nd.inputs = {x.index};
  nd.requires_grad = node(x).requires_grad;
  nd.backward = [w = std::move(weights)](Tape& t, std::size_t self) {
    const Tensor& dY = t.nodes_[self].grad;
    Tensor& dX = t.grad_of(t.nodes_[self].inputs[0]);
    for (std::size_t r = 0; r < dX.rows(); ++r)
      for (std::size_t c = 0; c < dX.cols(); ++c) dX(r, c) += w[r] * dY(r, c);
  };
  return push(std::move(nd));
}

Var Tape::sum(Var x) {
  const Tensor& X = node(x).value;
  double s = 0.0;
  for (double v : X.data()) s += v;
  Node nd;
  nd.value = Tensor(1, 1, s);
  nd.inputs = {x.index};
  nd.requires_grad = node(x).requires_grad;
  nd.backward = [](Tape& t, std::size_t self) {
    const double g = t.nodes_[self].grad[0];
    Tensor& dX = t.grad_of(t.nodes_[self].inputs[0]);
    for (double& v : dX.data()) v += g;
  };
  return push(std::move(nd));
}

Var Tape::mean(Var x) {
  const std::size_t count = node(x).value.size();
  if (count == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(count));
}

void Tape::backward(Var loss) {
  if (loss.tape_id == 0 || nodes_.empty()) {
    throw TapeUsageError("backward called without a recorded forward computation");
  }
  Node& root = node(loss);
  if (root.value.size() != 1) {
    throw TapeUsageError("backward requires a scalar loss, got " + root.value.shape_string());
  }
  for (auto& n : nodes_) n.grad = Tensor();
  if (!root.requires_grad) return;
  grad_of(loss.index)[0] = 1.0;

  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) {
      Tensor& pg = n.param->grad();
      if (!pg.same_shape(n.grad)) pg = Tensor::zeros_like(n.grad);
      for (std::size_t k = 0; k < pg.size(); ++k) pg[k] += n.grad[k];
    }
  }
  // Leaves that were never reached still report a zero gradient.
  for (std::size_t i = 0; i <= loss.index; ++i) {
    Node& n = nodes_[i];
    if ((n.keep_grad || n.requires_grad) && n.grad.size() == 0) grad_of(i);
  }
}

}  // namespace rijepa
