#pragma once

#include <array>
#include <vector>

#include "nhdeg/types.hpp"

namespace nhdeg {

// Radical-inverse Halton point (bases 2, 3, 5) with the given 1-based index,
// mapped to [-pi, pi)^3.
Momentum halton_momentum(long index);

// Quasi-uniform unit vectors on the sphere (golden-angle spiral).
std::vector<std::array<double, 3>> fibonacci_sphere(int count);

// Maps each component into [-pi, pi).
Momentum wrap_momentum(Momentum k);

// Distance on the 3-torus with period 2 pi per axis.
double torus_distance(const Momentum& a, const Momentum& b);

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// handled exactly once; callers write results into per-index slots.
template <class F>
void parallel_for(long count, int threads, F&& body);

}  // namespace nhdeg

#include "nhdeg/detail/parallel.hpp"
