#pragma once

#include <stdexcept>
#include <vector>

#include "rijepa/numcore/tensor.hpp"

namespace rijepa::experiments {

class DegenerateProbeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProbeOptions {
  double learning_rate = 0.1;
  std::size_t iterations = 1000;
  double l2 = 1e-4;  // on the weights, not the bias
};

struct ProbeResult {
  std::vector<double> weights;
  double bias = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Logistic regression by full-batch gradient descent from zero weights.
// A point is classed 1 when its logit is positive.
ProbeResult linear_probe(const Tensor& train_x, const std::vector<int>& train_y, const Tensor& test_x,
                         const std::vector<int>& test_y, const ProbeOptions& options = {});

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace rijepa::experiments
