#include "rijepa/experiments/probe.hpp"

#include <cmath>

namespace rijepa::experiments {
namespace {

void check_labels(const Tensor& x, const std::vector<int>& y, const char* what) {
  if (x.rows() != y.size()) throw DimensionError(std::string(what) + ": label count differs from row count");
  for (int v : y) {
    if (v != 0 && v != 1) throw std::invalid_argument(std::string(what) + ": labels must be 0 or 1");
  }
}

std::vector<int> classify(const Tensor& x, const std::vector<double>& w, double b) {
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = b;
    for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * x(i, k);
    out[i] = z > 0.0 ? 1 : 0;
  }
  return out;
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw DimensionError("accuracy: size mismatch");
  if (truth.empty()) throw std::invalid_argument("accuracy of an empty set");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

ProbeResult linear_probe(const Tensor& train_x, const std::vector<int>& train_y, const Tensor& test_x,
                         const std::vector<int>& test_y, const ProbeOptions& options) {
  check_labels(train_x, train_y, "probe training set");
  check_labels(test_x, test_y, "probe test set");
  if (train_x.cols() != test_x.cols()) throw DimensionError("probe: train and test widths differ");
  std::size_t positives = 0;
  for (int v : train_y) positives += v;
  if (positives == 0 || positives == train_y.size()) {
    throw DegenerateProbeError("probe training labels contain a single class");
  }
  const std::size_t n = train_x.rows(), d = train_x.cols();
  ProbeResult r;
  r.weights.assign(d, 0.0);
  std::vector<double> gw(d);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = r.bias;
      for (std::size_t k = 0; k < d; ++k) z += r.weights[k] * train_x(i, k);
      const double err = sigmoid(z) - train_y[i];
      for (std::size_t k = 0; k < d; ++k) gw[k] += err * train_x(i, k);
      gb += err;
    }
    for (std::size_t k = 0; k < d; ++k) {
      r.weights[k] -= options.learning_rate * (gw[k] / static_cast<double>(n) + options.l2 * r.weights[k]);
    }
    r.bias -= options.learning_rate * gb / static_cast<double>(n);
  }
  r.train_accuracy = accuracy(classify(train_x, r.weights, r.bias), train_y);
  r.test_accuracy = test_y.empty() ? 0.0 : accuracy(classify(test_x, r.weights, r.bias), test_y);
  return r;
}

}  // namespace rijepa::experiments
