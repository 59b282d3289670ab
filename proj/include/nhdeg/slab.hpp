#pragma once

#include <map>
#include <vector>

#include "nhdeg/model.hpp"

namespace nhdeg {

constexpr int kDefaultSlabSites = 60;
constexpr int kDefaultEdgeWidth = 3;
constexpr double kDefaultEdgeThreshold = 0.9;

// H(k) = sum_m T_m(k_perp) exp(i m k_open). Each hop m keeps its terms with
// the open-axis factor already replaced by the matching Fourier weight.
struct FourierBlocks {
  int n = 2;
  int open_axis = 1;
  std::map<int, std::vector<Term>> hops;
  // k_perp is a full momentum triple; its open-axis component is ignored.
  CMatrix block(int m, const Momentum& k_perp) const;
};

struct SlabHamiltonian {
  int open_axis = 1;
  int sites = 0;
  Momentum k_perp{};
  CMatrix matrix;
};

// Throws UnsupportedError if a term has more than one factor along the
// open axis (hopping range above one).
FourierBlocks fourier_blocks(const ModelSpec& model, int open_axis);

SlabHamiltonian obc_hamiltonian(const ModelSpec& model, int open_axis, int sites,
                                const Momentum& k_perp);

// Fraction of |state|^2 on the first and last `width` sites.
double edge_weight(const CVector& state, int sites, int width);

struct SlabState {
  cd energy;
  double edge_weight = 0.0;
};

// Eigenpairs of a slab sorted by (Re E, Im E) with their edge weights.
std::vector<SlabState> slab_spectrum(const SlabHamiltonian& slab, int width = kDefaultEdgeWidth);

}  // namespace nhdeg
