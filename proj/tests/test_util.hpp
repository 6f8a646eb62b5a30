#pragma once

#include <vector>

#include "cliff/signature.hpp"

// The signature set exercised by the property suites.
inline std::vector<cliff::MetricSignature> test_signatures() {
  return {{3, 0, 0}, {2, 0, 0}, {1, 1, 0}, {1, 3, 0},
          {5, 0, 0}, {2, 0, 1}, {1, 1, 1}};
}
