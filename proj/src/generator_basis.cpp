#include "nhdeg/generator_basis.hpp"

#include <cmath>
#include <utility>

namespace nhdeg {

namespace {

const cd I(0.0, 1.0);

// Imaginary antisymmetric generator on (i, j): -i at (i, j), +i at (j, i).
CMatrix antisym(int n, int i, int j) {
  CMatrix m = CMatrix::Zero(n, n);
  m(i, j) = -I;
  m(j, i) = I;
  return m;
}

CMatrix sym(int n, int i, int j) {
  CMatrix m = CMatrix::Zero(n, n);
  m(i, j) = 1.0;
  m(j, i) = 1.0;
  return m;
}

CMatrix diag(std::initializer_list<double> v) {
  const int n = static_cast<int>(v.size());
  CMatrix m = CMatrix::Zero(n, n);
  int i = 0;
  for (double x : v) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

GeneratorBasis build(int n) {
  GeneratorBasis b;
  b.n = n;
  b.matrices.push_back(CMatrix::Identity(n, n));
  if (n == 2) {
    b.matrices.push_back(sym(2, 0, 1));
    b.matrices.push_back(antisym(2, 0, 1));
    b.matrices.push_back(diag({1.0, -1.0}));
    return b;
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  for (auto [i, j] : pairs) b.matrices.push_back(antisym(n, i, j));
  for (auto [i, j] : pairs) b.matrices.push_back(sym(n, i, j));
  const double s3 = std::sqrt(3.0);
  if (n == 3) {
    b.matrices.push_back(diag({1.0, -1.0, 0.0}));
    b.matrices.push_back(diag({1.0 / s3, 1.0 / s3, -2.0 / s3}));
  } else {
    const double s6 = std::sqrt(6.0);
    b.matrices.push_back(diag({1.0, -1.0, 0.0, 0.0}));
    b.matrices.push_back(diag({1.0 / s3, 1.0 / s3, -2.0 / s3, 0.0}));
    b.matrices.push_back(diag({1.0 / s6, 1.0 / s6, 1.0 / s6, -std::sqrt(1.5)}));
  }
  return b;
}

}  // namespace

const GeneratorBasis& basis(int n) {
  static const GeneratorBasis b2 = build(2);
  static const GeneratorBasis b3 = build(3);
  static const GeneratorBasis b4 = build(4);
  switch (n) {
    case 2: return b2;
    case 3: return b3;
    case 4: return b4;
    default: throw std::invalid_argument("basis: band count must be 2, 3 or 4, got " + std::to_string(n));
  }
}

CoefficientVector decompose(const CMatrix& H) {
  if (H.rows() != H.cols())
    throw std::invalid_argument("decompose: matrix is not square");
  const int n = static_cast<int>(H.rows());
  const GeneratorBasis& b = basis(n);
  CoefficientVector out;
  out.n = n;
  out.d.resize(n * n);
  out.d[0] = H.trace() / double(n);
  for (int mu = 1; mu < n * n; ++mu) {
    // tr(H A) without forming the product
    out.d[mu] = (H.array() * b.matrices[mu].transpose().array()).sum() / 2.0;
  }
  return out;
}

CMatrix reconstruct(const CoefficientVector& d) {
  const GeneratorBasis& b = basis(d.n);
  if (static_cast<int>(d.d.size()) != d.n * d.n)
    throw std::invalid_argument("reconstruct: coefficient count does not match n^2");
  CMatrix H = CMatrix::Zero(d.n, d.n);
  for (int mu = 0; mu < d.n * d.n; ++mu) H += d.d[mu] * b.matrices[mu];
  return H;
}

}  // namespace nhdeg
