#pragma once

// Central finite-difference oracle. Deliberately independent of the tape: it
// only evaluates the scalar function at perturbed inputs.

#include <algorithm>
#include <cmath>
#include <functional>

#include "rijepa/numcore/tensor.hpp"

namespace rijepa::oracle {

inline Tensor numeric_gradient(const std::function<double()>& f, Tensor& x, double h = 1e-4) {
  Tensor g = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f();
    x[i] = saved - h;
    const double down = f();
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ‖a − b‖ / max(‖a‖, ‖b‖, floor).
inline double relative_error(const Tensor& a, const Tensor& b, double floor = 1e-8) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

}  // namespace rijepa::oracle
