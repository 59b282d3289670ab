#pragma once

#include <optional>
#include <vector>

#include "nhdeg/types.hpp"

namespace nhdeg {

constexpr double kDefaultRankTol = 1e-8;

// lambda^n - a lambda^{n-1} + b lambda^{n-2} - c lambda^{n-3} + d with the
// coefficients built from traces. For n=2 the constant term is b (= d); for
// n=3 it is c (= d). All four are filled for every n.
struct CharPolyCoeffs {
  int n = 0;
  cd a, b, c, d;
  cd evaluate(cd lambda) const;
};

struct DiscriminantSet {
  int n = 0;
  cd eta;
  std::optional<cd> nu;
  std::optional<cd> kappa;
  // eta (n=2), -(4 eta^3 + nu^2)/27 (n=3), (4 eta^3 - nu^2)/27 (n=4)
  cd discriminant() const;
};

struct SpectralData {
  std::vector<cd> eigenvalues;  // sorted by (real, imag)
  double right_eigvec_cond = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
};

struct MultiplicityStructure {
  cd eigenvalue;
  int algebraic = 0;
  int geometric = 0;
  std::vector<int> rank_sequence;  // rank (H - lambda I)^j, j = 1..algebraic
  // Jordan block sizes (descending) implied by the rank sequence.
  std::vector<int> jordan_blocks() const;
};

struct JordanDecomposition2x2 {
  CMatrix S;
  CMatrix J;
  double cond_S = 0.0;
};

CharPolyCoeffs char_poly_coeffs(const CMatrix& H);
DiscriminantSet discriminant_constraints(const CMatrix& H);
cd discriminant_oracle(const CMatrix& H);

// Sorted eigenvalues only. 2x2 uses the closed form.
std::vector<cd> eigenvalues(const CMatrix& H);
SpectralData eigen(const CMatrix& H);

double min_gap(const std::vector<cd>& ev);
double max_gap(const std::vector<cd>& ev);

// Radius used to group numerically coincident eigenvalues.
double cluster_radius(const CMatrix& H, double tol);

// Indices of the single-linkage cluster containing the eigenvalue nearest
// to lambda.
std::vector<int> eigenvalue_cluster(const std::vector<cd>& ev, cd lambda, double radius);

MultiplicityStructure multiplicity_structure(const CMatrix& H, cd lambda,
                                             double tol = kDefaultRankTol);
int diagonalizability_defect(const CMatrix& H, double tol = kDefaultRankTol);

int numerical_rank(const CMatrix& M, double cutoff);

// Closed-form Jordan form of a defective 2x2 matrix. The chain vectors are
// s1 = u (unit, phase fixed) and s2 = w / sigma1 where N = H - lambda I =
// sigma1 u w^dagger.
JordanDecomposition2x2 jordan_decompose_2x2(const CMatrix& H, double tol = kDefaultRankTol);

// Complex Schur form of H reordered so that the m diagonal entries closest
// to `center` come first; returns that leading m x m triangular block.
CMatrix schur_cluster_block(const CMatrix& H, cd center, int m);

}  // namespace nhdeg
