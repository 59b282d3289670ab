#pragma once

#include <vector>

#include "nhdeg/types.hpp"

namespace nhdeg {

struct GeneratorBasis {
  int n = 0;
  // Identity first, then the n^2-1 traceless Hermitian generators
  // normalised to tr(A B) = 2 delta_ab.
  std::vector<CMatrix> matrices;
};

struct CoefficientVector {
  int n = 0;
  std::vector<cd> d;  // length n^2, d[0] multiplies the identity
};

// Pauli (n=2), Gell-Mann (n=3) or generalised Gell-Mann (n=4) basis.
// Throws std::invalid_argument for any other n.
const GeneratorBasis& basis(int n);

CoefficientVector decompose(const CMatrix& H);
CMatrix reconstruct(const CoefficientVector& d);

}  // namespace nhdeg
