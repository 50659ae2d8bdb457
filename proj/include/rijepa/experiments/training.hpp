#pragma once

#include <string>
#include <vector>

#include "rijepa/model/model.hpp"
#include "rijepa/objectives/losses.hpp"

namespace rijepa::experiments {

struct TrainedModel {
  std::string name;
  model::DualEncoderModel model;
  std::vector<objectives::LossComponents> history;  // one entry per epoch
};

// Bitwise equality of f_c_data, g and f_t_data.
bool same_data_pathway(const model::DualEncoderModel& a, const model::DualEncoderModel& b);

}  // namespace rijepa::experiments
