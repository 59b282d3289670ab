#include "nhdeg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nhdeg {

namespace {

void require_supported(const CMatrix& H, const char* who) {
  if (H.rows() != H.cols() || H.rows() < 2 || H.rows() > 4)
    throw std::invalid_argument(std::string(who) + ": expected a square 2x2, 3x3 or 4x4 matrix");
}

bool less_re_im(cd x, cd y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

double spectral_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

cd det(const CMatrix& H) {
  if (H.rows() == 2) return H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
  return H.determinant();
}

}  // namespace

cd CharPolyCoeffs::evaluate(cd x) const {
  switch (n) {
    case 2: return x * x - a * x + d;
    case 3: return x * x * x - a * x * x + b * x - d;
    default: return x * x * x * x - a * x * x * x + b * x * x - c * x + d;
  }
}

cd DiscriminantSet::discriminant() const {
  switch (n) {
    case 2: return eta;
    case 3: return -(4.0 * eta * eta * eta + (*nu) * (*nu)) / 27.0;
    default: return (4.0 * eta * eta * eta - (*nu) * (*nu)) / 27.0;
  }
}

CharPolyCoeffs char_poly_coeffs(const CMatrix& H) {
  require_supported(H, "char_poly_coeffs");
  const CMatrix H2 = H * H;
  const cd t1 = H.trace();
  const cd t2 = H2.trace();
  const cd t3 = (H2 * H).trace();
  CharPolyCoeffs p;
  p.n = static_cast<int>(H.rows());
  p.a = t1;
  p.b = (t1 * t1 - t2) / 2.0;
  p.c = (t1 * t1 * t1 - 3.0 * t1 * t2 + 2.0 * t3) / 6.0;
  p.d = det(H);
  return p;
}

DiscriminantSet discriminant_constraints(const CMatrix& H) {
  const CharPolyCoeffs p = char_poly_coeffs(H);
  DiscriminantSet s;
  s.n = p.n;
  const cd a = p.a, b = p.b, c = p.c, d = p.d;
  if (p.n == 2) {
    s.eta = a * a - 4.0 * d;
  } else if (p.n == 3) {
    const cd t2 = (H * H).trace();
    s.eta = (a * a - 3.0 * t2) / 2.0;
    s.nu = (54.0 * d - 5.0 * a * a * a + 9.0 * a * t2) / 2.0;
  } else {
    s.eta = -3.0 * a * c + b * b + 12.0 * d;
    s.nu = 27.0 * a * a * d - 9.0 * a * b * c + 2.0 * b * b * b - 72.0 * b * d + 27.0 * c * c;
    s.kappa = a * a * a - 4.0 * a * b + 8.0 * c;
  }
  return s;
}

cd discriminant_oracle(const CMatrix& H) {
  require_supported(H, "discriminant_oracle");
  const std::vector<cd> ev = eigenvalues(H);
  cd D = 1.0;
  for (size_t i = 0; i < ev.size(); ++i)
    for (size_t j = i + 1; j < ev.size(); ++j) D *= (ev[i] - ev[j]) * (ev[i] - ev[j]);
  return D;
}

std::vector<cd> eigenvalues(const CMatrix& H) {
  require_supported(H, "eigenvalues");
  std::vector<cd> ev;
  if (H.rows() == 2) {
    const cd m = (H(0, 0) + H(1, 1)) / 2.0;
    const cd h = (H(0, 0) - H(1, 1)) / 2.0;
    const cd s = std::sqrt(h * h + H(0, 1) * H(1, 0));
    ev = {m - s, m + s};
  } else {
    Eigen::ComplexEigenSolver<CMatrix> es(H, false);
    if (es.info() != Eigen::Success) throw NumericFailure("eigensolver did not converge", H);
    ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
  }
  if (!std::all_of(ev.begin(), ev.end(), [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }))
    throw NumericFailure("non-finite eigenvalue", H);
  std::sort(ev.begin(), ev.end(), less_re_im);
  return ev;
}

double min_gap(const std::vector<cd>& ev) {
  double g = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < ev.size(); ++i)
    for (size_t j = i + 1; j < ev.size(); ++j) g = std::min(g, std::abs(ev[i] - ev[j]));
  return g;
}

double max_gap(const std::vector<cd>& ev) {
  double g = 0.0;
  for (size_t i = 0; i < ev.size(); ++i)
    for (size_t j = i + 1; j < ev.size(); ++j) g = std::max(g, std::abs(ev[i] - ev[j]));
  return g;
}

SpectralData eigen(const CMatrix& H) {
  require_supported(H, "eigen");
  Eigen::ComplexEigenSolver<CMatrix> es(H, true);
  if (es.info() != Eigen::Success) throw NumericFailure("eigensolver did not converge", H);
  SpectralData out;
  out.eigenvalues = eigenvalues(H);
  out.min_gap = min_gap(out.eigenvalues);
  out.max_gap = max_gap(out.eigenvalues);

  if (diagonalizability_defect(H) > 0) {
    out.right_eigvec_cond = std::numeric_limits<double>::infinity();
  } else {
    CMatrix V = es.eigenvectors();
    for (int j = 0; j < V.cols(); ++j) V.col(j).normalize();
    Eigen::JacobiSVD<CMatrix> svd(V);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    out.right_eigvec_cond = smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  }
  return out;
}

double cluster_radius(const CMatrix& H, double tol) {
  const double n = static_cast<double>(H.rows());
  // A size-m Jordan block perturbed at relative level tol splits by tol^(1/m).
  return std::max({tol, 1e-6 * (1.0 + spectral_norm(H)), std::pow(tol, 1.0 / n)});
}

std::vector<int> eigenvalue_cluster(const std::vector<cd>& ev, cd lambda, double radius) {
  const int n = static_cast<int>(ev.size());
  std::vector<char> in(n, 0);
  int nearest = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(ev[i] - lambda) < std::abs(ev[nearest] - lambda)) nearest = i;
  in[nearest] = 1;
  for (int i = 0; i < n; ++i)
    if (std::abs(ev[i] - lambda) <= radius) in[i] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (int i = 0; i < n; ++i) {
      if (in[i]) continue;
      for (int j = 0; j < n; ++j) {
        if (in[j] && std::abs(ev[i] - ev[j]) <= radius) {
          in[i] = 1;
          grew = true;
          break;
        }
      }
    }
  }
  std::vector<int> idx;
  for (int i = 0; i < n; ++i)
    if (in[i]) idx.push_back(i);
  return idx;
}

int numerical_rank(const CMatrix& M, double cutoff) {
  Eigen::JacobiSVD<CMatrix> svd(M);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

std::vector<int> MultiplicityStructure::jordan_blocks() const {
  // r_0 = n is implied: number of blocks of size >= j is r_{j-1} - r_j.
  std::vector<int> r;
  r.push_back(rank_sequence.empty() ? 0 : rank_sequence.front() + geometric);
  r.insert(r.end(), rank_sequence.begin(), rank_sequence.end());
  r.push_back(r.back());
  std::vector<int> blocks;
  for (size_t j = 1; j + 1 < r.size(); ++j) {
    const int at_least_j = r[j - 1] - r[j];
    const int at_least_j1 = r[j] - r[j + 1];
    for (int c = 0; c < at_least_j - at_least_j1; ++c) blocks.push_back(static_cast<int>(j));
  }
  std::sort(blocks.rbegin(), blocks.rend());
  return blocks;
}

MultiplicityStructure multiplicity_structure(const CMatrix& H, cd lambda, double tol) {
  require_supported(H, "multiplicity_structure");
  const int n = static_cast<int>(H.rows());
  const std::vector<cd> ev = eigenvalues(H);
  const double radius = cluster_radius(H, tol);
  double nearest = std::numeric_limits<double>::infinity();
  for (cd z : ev) nearest = std::min(nearest, std::abs(z - lambda));
  if (nearest > radius)
    throw std::invalid_argument("multiplicity_structure: value is not an eigenvalue within tolerance");

  const std::vector<int> cl = eigenvalue_cluster(ev, lambda, radius);
  cd centre = 0.0;
  for (int i : cl) centre += ev[i];
  centre /= double(cl.size());

  MultiplicityStructure ms;
  ms.eigenvalue = centre;
  ms.algebraic = static_cast<int>(cl.size());
  const double scale = 1.0 + spectral_norm(H);
  const CMatrix N = H - centre * CMatrix::Identity(n, n);
  CMatrix P = CMatrix::Identity(n, n);
  int prev = n;
  for (int j = 1; j <= ms.algebraic; ++j) {
    P = P * N;
    const int r = std::min(prev, numerical_rank(P, tol * std::pow(scale, j)));
    ms.rank_sequence.push_back(r);
    prev = r;
  }
  ms.geometric = std::clamp(n - ms.rank_sequence.front(), 1, ms.algebraic);
  // Keep the rank sequence consistent with the clamped geometric multiplicity.
  ms.rank_sequence.front() = n - ms.geometric;
  for (size_t j = 1; j < ms.rank_sequence.size(); ++j)
    ms.rank_sequence[j] = std::min(ms.rank_sequence[j], ms.rank_sequence[j - 1]);
  return ms;
}

int diagonalizability_defect(const CMatrix& H, double tol) {
  require_supported(H, "diagonalizability_defect");
  const std::vector<cd> ev = eigenvalues(H);
  const double radius = cluster_radius(H, tol);
  std::vector<char> seen(ev.size(), 0);
  int defect = 0;
  for (size_t i = 0; i < ev.size(); ++i) {
    if (seen[i]) continue;
    const std::vector<int> cl = eigenvalue_cluster(ev, ev[i], radius);
    for (int j : cl) seen[j] = 1;
    if (cl.size() < 2) continue;
    const MultiplicityStructure ms = multiplicity_structure(H, ev[i], tol);
    defect = std::max(defect, ms.algebraic - ms.geometric);
  }
  return defect;
}

JordanDecomposition2x2 jordan_decompose_2x2(const CMatrix& H, double tol) {
  if (H.rows() != 2 || H.cols() != 2)
    throw std::invalid_argument("jordan_decompose_2x2: expected a 2x2 matrix");
  if (diagonalizability_defect(H, tol) != 1)
    throw std::invalid_argument("jordan_decompose_2x2: matrix is diagonalizable");
  const cd lambda = H.trace() / 2.0;
  const CMatrix N = H - lambda * CMatrix::Identity(2, 2);
  Eigen::JacobiSVD<CMatrix> svd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s1 = svd.singularValues()(0);
  CVector u = svd.matrixU().col(0);
  CVector w = svd.matrixV().col(0);
  // Fix the common phase so the dominant entry of u is real and positive.
  const int p = std::abs(u(0)) >= std::abs(u(1)) ? 0 : 1;
  const cd phase = std::conj(u(p)) / std::abs(u(p));
  u *= phase;
  w *= phase;

  JordanDecomposition2x2 out;
  out.S.resize(2, 2);
  out.S.col(0) = u;
  out.S.col(1) = w / s1;
  out.J = CMatrix::Zero(2, 2);
  out.J(0, 0) = lambda;
  out.J(1, 1) = lambda;
  out.J(0, 1) = 1.0;
  Eigen::JacobiSVD<CMatrix> ss(out.S);
  out.cond_S = ss.singularValues()(0) / ss.singularValues()(1);
  return out;
}

CMatrix schur_cluster_block(const CMatrix& H, cd center, int m) {
  const int n = static_cast<int>(H.rows());
  if (m < 1 || m > n) throw std::invalid_argument("schur_cluster_block: bad cluster size");
  if (m == n) return H;
  Eigen::ComplexSchur<CMatrix> cs(H, false);
  if (cs.info() != Eigen::Success) throw NumericFailure("Schur decomposition did not converge", H);
  CMatrix T = cs.matrixT();

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(T(x, x) - center) < std::abs(T(y, y) - center);
  });
  std::vector<char> selected(n, 0);
  for (int i = 0; i < m; ++i) selected[order[i]] = 1;

  // Bubble selected diagonal entries to the front with adjacent swaps.
  for (int target = 0; target < m; ++target) {
    int pos = target;
    while (!selected[pos]) ++pos;
    for (int k = pos - 1; k >= target; --k) {
      const cd t11 = T(k, k), t22 = T(k + 1, k + 1);
      Eigen::JacobiRotation<cd> G;
      G.makeGivens(T(k, k + 1), t22 - t11);
      T.applyOnTheLeft(k, k + 1, G.adjoint());
      T.applyOnTheRight(k, k + 1, G);
      T(k + 1, k) = 0.0;
      T(k, k) = t22;
      T(k + 1, k + 1) = t11;
      std::swap(selected[k], selected[k + 1]);
    }
  }
  return T.topLeftCorner(m, m);
}

}  // namespace nhdeg
