#include "rijepa/numcore/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace rijepa {

AdamW::AdamW(std::vector<Parameter*> params, AdamWOptions options)
    : params_(std::move(params)), options_(options) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.push_back(Tensor::zeros_like(p->value()));
    v_.push_back(Tensor::zeros_like(p->value()));
  }
}

void AdamW::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

void AdamW::step() {
  ++step_;
  const double lr = options_.learning_rate;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double decay = 1.0 - lr * options_.weight_decay;

  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& w = params_[k]->value();
    const Tensor& g = params_[k]->grad();
    require_same_shape(w, g, "AdamW::step");
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] *= decay;
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.eps);
    }
  }
}

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("clip_grad_norm: max_norm must be positive");
  double sq = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad().data()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (Parameter* p : params)
      for (double& g : p->grad().data()) g *= factor;
  }
  return norm;
}

void ema_update(const std::vector<Parameter*>& target, const std::vector<const Parameter*>& source,
                double tau) {
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("ema_update: tau outside [0, 1]");
  if (target.size() != source.size()) throw DimensionError("ema_update: parameter count mismatch");
  for (std::size_t k = 0; k < target.size(); ++k) {
    Tensor& t = target[k]->value();
    const Tensor& s = source[k]->value();
    require_same_shape(t, s, "ema_update");
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * t[i] + (1.0 - tau) * s[i];
  }
}

}  // namespace rijepa
