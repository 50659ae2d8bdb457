#include "rijepa/experiments/training.hpp"

#include <cstring>

namespace rijepa::experiments {
namespace {

std::vector<const Parameter*> data_pathway(const model::DualEncoderModel& m) {
  auto out = m.data_context_parameters();
  for (const Parameter* p : m.predictor().parameters()) out.push_back(p);
  for (const Parameter* p : m.data_target_parameters()) out.push_back(p);
  return out;
}

}  // namespace

bool same_data_pathway(const model::DualEncoderModel& a, const model::DualEncoderModel& b) {
  const auto pa = data_pathway(a);
  const auto pb = data_pathway(b);
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
  {
    const Tensor& x = pa[i]->value();
    const Tensor& y = pb[i]->value();
    if (!x.same_shape(y) || std::memcmp(x.data().data(), y.data().data(), x.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

}  // namespace rijepa::experiments
