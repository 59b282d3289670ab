#include "nhdeg/sampling.hpp"

#include <cmath>

namespace nhdeg {

namespace {

double radical_inverse(long i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

Momentum halton_momentum(long index) {
  return {-kPi + 2.0 * kPi * radical_inverse(index, 2), -kPi + 2.0 * kPi * radical_inverse(index, 3),
          -kPi + 2.0 * kPi * radical_inverse(index, 5)};
}

std::vector<std::array<double, 3>> fibonacci_sphere(int count) {
  std::vector<std::array<double, 3>> dirs(count);
  const double golden = kPi * (1.0 + std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double polar = std::acos(1.0 - 2.0 * (i + 0.5) / count);
    const double azimuth = golden * (i + 0.5);
    dirs[i] = {std::cos(azimuth) * std::sin(polar), std::sin(azimuth) * std::sin(polar), std::cos(polar)};
  }
  return dirs;
}

Momentum wrap_momentum(Momentum k) {
  for (double& x : k) {
    x -= 2.0 * kPi * std::floor((x + kPi) / (2.0 * kPi));
    if (x >= kPi) x -= 2.0 * kPi;
  }
  return k;
}

double torus_distance(const Momentum& a, const Momentum& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    double d = std::fmod(std::abs(a[i] - b[i]), 2.0 * kPi);
    d = std::min(d, 2.0 * kPi - d);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace nhdeg
