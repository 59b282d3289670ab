#include "nhdeg/symmetry.hpp"

#include "nhdeg/sampling.hpp"

namespace nhdeg {

namespace {

CMatrix diag_pm(int n) {
  CMatrix m = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  return m;
}

ConstraintDescriptor row(std::vector<std::string> def, std::vector<std::string> nondef) {
  ConstraintDescriptor c;
  c.codimension_defective = static_cast<int>(def.size());
  c.codimension_nondefective = static_cast<int>(nondef.size());
  c.defective_constraints = std::move(def);
  c.nondefective_constraints = std::move(nondef);
  return c;
}

}  // namespace

SymmetryKind parse_symmetry_kind(const std::string& s) {
  if (s == "PT" || s == "pt") return SymmetryKind::PT;
  if (s == "CP" || s == "cp") return SymmetryKind::CP;
  if (s == "psH" || s == "psh") return SymmetryKind::psH;
  if (s == "TRSdag" || s == "trsdag") return SymmetryKind::TRSdag;
  throw std::invalid_argument("unknown symmetry kind '" + s + "' (expected PT, CP, psH or TRSdag)");
}

std::string symmetry_kind_name(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::PT: return "PT";
    case SymmetryKind::CP: return "CP";
    case SymmetryKind::psH: return "psH";
    default: return "TRSdag";
  }
}

SymmetrySpec make_symmetry(SymmetryKind kind, const CMatrix& generator) {
  if (generator.rows() != generator.cols() || generator.rows() == 0)
    throw std::invalid_argument("symmetry generator must be a non-empty square matrix");
  const CMatrix id = CMatrix::Identity(generator.rows(), generator.cols());
  if ((generator.adjoint() * generator - id).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("symmetry generator is not unitary");
  return {kind, generator};
}

SymmetrySpec default_symmetry(SymmetryKind kind, int n) {
  if (n == 2) {
    CMatrix g = CMatrix::Identity(2, 2);
    if (kind == SymmetryKind::psH) {
      g << 0, 1, 1, 0;  // adiag[1, 1]
    } else if (kind == SymmetryKind::TRSdag) {
      g << 0, 1, -1, 0;  // adiag[1, -1] = i sigma_y
    }
    return make_symmetry(kind, g);
  }
  if (n == 3 || n == 4) {
    if (kind == SymmetryKind::TRSdag)
      throw UnsupportedError("TRSdag is only tabulated for two-band models");
    return make_symmetry(kind, diag_pm(n));
  }
  throw UnsupportedError("no tabulated generator for n = " + std::to_string(n));
}

double symmetry_residual(const ModelSpec& model, const SymmetrySpec& spec, const Momentum& k) {
  const CMatrix& U = spec.generator;
  if (U.rows() != model.n || U.cols() != model.n)
    throw std::invalid_argument("symmetry generator dimension does not match band count");
  const CMatrix H = eval_bloch(model, k);
  const CMatrix Uinv = U.inverse();
  CMatrix r;
  switch (spec.kind) {
    case SymmetryKind::PT: r = H - U * H.conjugate() * Uinv; break;
    case SymmetryKind::CP: r = H + U * H.conjugate() * Uinv; break;
    case SymmetryKind::psH: r = H - U * H.adjoint() * Uinv; break;
    case SymmetryKind::TRSdag: {
      const CMatrix Hm = eval_bloch(model, {-k[0], -k[1], -k[2]});
      r = Hm - U * H.adjoint() * U.adjoint();
      break;
    }
  }
  return r.cwiseAbs().maxCoeff();
}

SymmetryCheck verify_symmetry(const ModelSpec& model, const SymmetrySpec& spec, int samples, double tol,
                              long first_index) {
  if (samples < 1) throw std::invalid_argument("verify_symmetry: need at least one sample");
  SymmetryCheck out;
  out.samples = samples;
  for (int i = 0; i < samples; ++i)
    out.max_residual = std::max(out.max_residual, symmetry_residual(model, spec, halton_momentum(first_index + i)));
  out.pass = out.max_residual <= tol;
  return out;
}

ConstraintDescriptor reduced_constraints(const SymmetrySpec& spec, int n) {
  using K = SymmetryKind;
  if (n == 2) {
    switch (spec.kind) {
      case K::PT: return row({"eta_R"}, {"d_xR", "d_yI", "d_zR"});
      case K::CP: return row({"eta_R"}, {"d_xI", "d_yR", "d_zI"});
      case K::psH: return row({"eta_R"}, {"d_xR", "d_yI", "d_zI"});
      case K::TRSdag: return row({"eta_R", "eta_I"}, {"d_xa", "d_ya", "d_za"});
    }
  }
  if (n == 3) {
    switch (spec.kind) {
      case K::PT:
        return row({"eta_R", "nu_R"}, {"d_1R", "d_4I", "d_2I", "d_5R", "d_3R", "d_6I", "d_7R", "d_8R"});
      case K::CP:
        return row({"eta_R", "nu_I"}, {"d_1I", "d_4R", "d_2R", "d_5I", "d_3I", "d_6R", "d_7I", "d_8I"});
      case K::psH:
        return row({"eta_R", "nu_R"}, {"d_1I", "d_4I", "d_2R", "d_5R", "d_3I", "d_6I", "d_7R", "d_8R"});
      default: break;
    }
  }
  if (n == 4) {
    switch (spec.kind) {
      case K::PT:
        return row({"eta_R", "nu_R", "kappa_R"},
                   {"d_1R", "d_2I", "d_3R", "d_4R", "d_5I", "d_6R", "d_7I", "d_8R", "d_9I", "d_10I", "d_11R",
                    "d_12I", "d_13R", "d_14R", "d_15R"});
      case K::CP:
        return row({"eta_R", "nu_R", "kappa_I"},
                   {"d_1I", "d_2R", "d_3I", "d_4I", "d_5R", "d_6I", "d_7R", "d_8I", "d_9R", "d_10R", "d_11I",
                    "d_12R", "d_13I", "d_14I", "d_15I"});
      case K::psH:
        return row({"eta_R", "nu_R", "kappa_R"},
                   {"d_1I", "d_2R", "d_3I", "d_4I", "d_5R", "d_6I", "d_7I", "d_8R", "d_9I", "d_10I", "d_11R",
                    "d_12I", "d_13R", "d_14R", "d_15R"});
      default: break;
    }
  }
  throw UnsupportedError("no constraint table for " + symmetry_kind_name(spec.kind) + " with n = " +
                         std::to_string(n));
}

std::vector<std::vector<double>> trim_points(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("trim_points: dimension must be 1, 2 or 3");
  std::vector<std::vector<double>> pts;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    std::vector<double> k(dim);
    for (int a = 0; a < dim; ++a) k[a] = (mask >> (dim - 1 - a)) & 1 ? kPi : 0.0;
    pts.push_back(k);
  }
  return pts;
}

}  // namespace nhdeg
