#pragma once

#include <string>
#include <vector>

#include "nhdeg/model.hpp"

namespace nhdeg {

enum class SymmetryKind { PT, CP, psH, TRSdag };

struct SymmetrySpec {
  SymmetryKind kind = SymmetryKind::PT;
  CMatrix generator;
};

struct ConstraintDescriptor {
  std::vector<std::string> defective_constraints;
  std::vector<std::string> nondefective_constraints;
  int codimension_defective = 0;
  int codimension_nondefective = 0;
};

struct SymmetryCheck {
  bool pass = false;
  double max_residual = 0.0;
  int samples = 0;
};

SymmetryKind parse_symmetry_kind(const std::string& s);
std::string symmetry_kind_name(SymmetryKind kind);

// Validates unitarity (to 1e-12); throws std::invalid_argument otherwise.
SymmetrySpec make_symmetry(SymmetryKind kind, const CMatrix& generator);

// The generator listed for (kind, n) in the constraint tables.
// Throws UnsupportedError for combinations the tables do not cover.
SymmetrySpec default_symmetry(SymmetryKind kind, int n);

// Max-norm of the defining relation:
//   PT   H(k) - U H*(k) U^-1      CP   H(k) + U H*(k) U^-1
//   psH  H(k) - U H^+(k) U^-1     TRS+ H(-k) - U H^+(k) U^+
double symmetry_residual(const ModelSpec& model, const SymmetrySpec& spec, const Momentum& k);

// Residual over the Halton points first_index .. first_index + samples - 1.
SymmetryCheck verify_symmetry(const ModelSpec& model, const SymmetrySpec& spec, int samples,
                              double tol, long first_index = 1);

ConstraintDescriptor reduced_constraints(const SymmetrySpec& spec, int n);

// All momenta with components in {0, pi}, in binary counting order.
std::vector<std::vector<double>> trim_points(int dim);

}  // namespace nhdeg
