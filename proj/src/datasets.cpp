#include "cliff/datasets.hpp"

#include <cmath>

namespace cliff {

double signed_tetra_volume(const std::array<std::array<double, 3>, 4>& pts) {
  double e[3][3];
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 3; ++i) e[c][i] = pts[c + 1][i] - pts[0][i];
  const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                     e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                     e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
  return det / 6.0;
}

std::vector<SignedVolumeSample> gen_signed_volume_dataset(int count,
                                                          Rng& rng) {
  std::vector<SignedVolumeSample> data(count);
  for (auto& s : data) {
    for (auto& p : s.points)
      for (auto& c : p) c = rng.normal();
    s.volume = signed_tetra_volume(s.points);
  }
  return data;
}

double o5_target(const std::array<double, 5>& x1,
                 const std::array<double, 5>& x2) {
  double n1 = 0.0, n2 = 0.0, dot = 0.0;
  for (int i = 0; i < 5; ++i) {
    n1 += x1[i] * x1[i];
    n2 += x2[i] * x2[i];
    dot += x1[i] * x2[i];
  }
  n1 = std::sqrt(n1);
  n2 = std::sqrt(n2);
  return std::sin(n1) - 0.5 * n2 * n2 * n2 + dot / (n1 * n2);
}

std::vector<O5Sample> gen_o5_regression_dataset(int count, Rng& rng) {
  std::vector<O5Sample> data(count);
  auto draw = [&rng](std::array<double, 5>& x) {
    for (;;) {
      double norm2 = 0.0;
      for (auto& c : x) {
        c = rng.normal();
        norm2 += c * c;
      }
      if (std::sqrt(norm2) >= 1e-6) return;
    }
  };
  for (auto& s : data) {
    draw(s.x1);
    draw(s.x2);
    s.f = o5_target(s.x1, s.x2);
  }
  return data;
}

}  // namespace cliff
