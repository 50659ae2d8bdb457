#include "rijepa/experiments/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rijepa::experiments {

SymmetricEigen jacobi_eigen(const Tensor& symmetric, double tolerance, std::size_t max_sweeps) {
  const std::size_t n = symmetric.rows();
  if (n != symmetric.cols()) throw DimensionError("jacobi_eigen: matrix is not square");
  Tensor a = symmetric;
  Tensor v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (double x : a.data()) scale += x * x;
  const double stop = tolerance * tolerance * std::max(scale, 1e-300);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (off <= stop) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out{std::vector<double>(n), Tensor(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

PcaResult pca_fit_project(const Tensor& x, std::size_t components) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw std::invalid_argument("PCA needs at least two rows");
  if (components == 0 || components > d) {
    throw std::invalid_argument("PCA component count must be in [1, " + std::to_string(d) + "]");
  }
  PcaResult r;
  r.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) r.mean[j] += x(i, j);
  for (double& m : r.mean) m /= static_cast<double>(n);

  Tensor cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(i, a) - r.mean[a];
      for (std::size_t b = a; b < d; ++b) cov(a, b) += da * (x(i, b) - r.mean[b]);
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= static_cast<double>(n - 1);
      cov(b, a) = cov(a, b);
    }
  }
  double total = 0.0;
  double magnitude = 0.0;
  for (std::size_t a = 0; a < d; ++a) total += cov(a, a);
  for (double m : r.mean) magnitude += m * m;
  if (!(total > 1e-24 * std::max(1.0, magnitude))) throw DegenerateInputError("PCA input has zero variance");

  const auto eig = jacobi_eigen(cov);
  r.eigenvalues = eig.values;
  for (double& v : r.eigenvalues) v = std::max(v, 0.0);
  r.components = Tensor(components, d);
  for (std::size_t c = 0; c < components; ++c) {
    std::size_t big = 0;
    for (std::size_t k = 1; k < d; ++k)
      if (std::abs(eig.vectors(k, c)) > std::abs(eig.vectors(big, c))) big = k;
    const double sign = eig.vectors(big, c) < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < d; ++k) r.components(c, k) = sign * eig.vectors(k, c);
    r.explained_ratio.push_back(r.eigenvalues[c] / total);
  }
  r.projected = pca_project(r, x);
  return r;
}

Tensor pca_project(const PcaResult& pca, const Tensor& x) {
  const std::size_t d = pca.mean.size();
  if (x.cols() != d) throw DimensionError("pca_project: width mismatch");
  Tensor out(x.rows(), pca.components.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < pca.components.rows(); ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += (x(i, k) - pca.mean[k]) * pca.components(c, k);
      out(i, c) = s;
    }
  return out;
}

}  // namespace rijepa::experiments
