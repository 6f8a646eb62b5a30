#pragma once

#include <array>
#include <vector>

#include "cliff/random.hpp"

namespace cliff {

struct SignedVolumeSample {
  std::array<std::array<double, 3>, 4> points;
  double volume;  // det[p1-p0, p2-p0, p3-p0] / 6
};

// Random tetrahedra with standard-normal vertices.
std::vector<SignedVolumeSample> gen_signed_volume_dataset(int count, Rng& rng);

double signed_tetra_volume(const std::array<std::array<double, 3>, 4>& pts);

struct O5Sample {
  std::array<double, 5> x1;
  std::array<double, 5> x2;
  double f;  // sin(|x1|) - |x2|^3 / 2 + <x1,x2> / (|x1| |x2|)
};

// Standard-Gaussian pairs; inputs with norm below 1e-6 are resampled.
std::vector<O5Sample> gen_o5_regression_dataset(int count, Rng& rng);

double o5_target(const std::array<double, 5>& x1,
                 const std::array<double, 5>& x2);

}  // namespace cliff
