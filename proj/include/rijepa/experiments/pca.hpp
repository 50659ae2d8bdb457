#pragma once

#include <stdexcept>
#include <vector>

#include "rijepa/numcore/tensor.hpp"

namespace rijepa::experiments {

class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues descending; column j of `vectors` belongs to eigenvalue j.
struct SymmetricEigen {
  std::vector<double> values;
  Tensor vectors;
};
SymmetricEigen jacobi_eigen(const Tensor& symmetric, double tolerance = 1e-14, std::size_t max_sweeps = 100);

struct PcaResult {
  std::vector<double> mean;
  Tensor components;                    // k × d, one component per row
  std::vector<double> eigenvalues;      // all d, descending
  std::vector<double> explained_ratio;  // first k
  Tensor projected;                     // n × k
};

// Components have their largest-magnitude entry positive.
PcaResult pca_fit_project(const Tensor& x, std::size_t components);
Tensor pca_project(const PcaResult& pca, const Tensor& x);

}  // namespace rijepa::experiments
