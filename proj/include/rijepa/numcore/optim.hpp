#pragma once

#include <cstdint>
#include <vector>

#include "rijepa/numcore/tape.hpp"

namespace rijepa {

struct AdamWOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// AdamW with decoupled weight decay. Holds first/second moments for a fixed
// parameter list; the list must outlive the optimizer.
class AdamW {
 public:
  AdamW(std::vector<Parameter*> params, AdamWOptions options = {});

  void step();
  void zero_grad();

  std::int64_t step_count() const { return step_; }
  const AdamWOptions& options() const { return options_; }
  const std::vector<Parameter*>& parameters() const { return params_; }
  const Tensor& first_moment(std::size_t i) const { return m_.at(i); }
  const Tensor& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  std::vector<Parameter*> params_;
  AdamWOptions options_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t step_ = 0;
};

// Scales all gradients by max_norm/total_norm when the global L2 norm exceeds
// max_norm. Returns the norm before clipping.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

// target ← tau·target + (1 − tau)·source, parameter by parameter.
void ema_update(const std::vector<Parameter*>& target, const std::vector<const Parameter*>& source,
                double tau);

}  // namespace rijepa
