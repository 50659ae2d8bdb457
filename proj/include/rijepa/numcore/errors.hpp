#pragma once

#include <stdexcept>

namespace rijepa {

// Non-finite loss, energy or parameter encountered during a run.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rijepa
