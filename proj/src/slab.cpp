#include "nhdeg/slab.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nhdeg/generator_basis.hpp"

namespace nhdeg {

CMatrix FourierBlocks::block(int m, const Momentum& k_perp) const {
  ModelSpec part;
  part.n = n;
  auto it = hops.find(m);
  if (it != hops.end()) part.terms = it->second;
  return eval_bloch(part, k_perp);
}

FourierBlocks fourier_blocks(const ModelSpec& model, int open_axis) {
  if (open_axis < 0 || open_axis > 2) throw std::invalid_argument("fourier_blocks: bad axis");
  FourierBlocks fb;
  fb.n = model.n;
  fb.open_axis = open_axis;
  const cd I(0.0, 1.0);
  for (const Term& term : model.terms) {
    Term rest = term;
    rest.factors.clear();
    const Factor* along = nullptr;
    for (const Factor& f : term.factors) {
      if (f.fn != Trig::Const && f.axis == open_axis) {
        if (along)
          throw UnsupportedError(std::string("fourier_blocks: hopping range above one along ") +
                                 axis_name(open_axis));
        along = &f;
      } else {
        rest.factors.push_back(f);
      }
    }
    if (!along) {
      fb.hops[0].push_back(rest);
      continue;
    }
    // cos = (e^{ik} + e^{-ik})/2, sin = (e^{ik} - e^{-ik})/(2i)
    Term plus = rest, minus = rest;
    if (along->fn == Trig::Cos) {
      plus.coeff = rest.coeff / 2.0;
      minus.coeff = rest.coeff / 2.0;
    } else {
      plus.coeff = rest.coeff / (2.0 * I);
      minus.coeff = -rest.coeff / (2.0 * I);
    }
    fb.hops[1].push_back(plus);
    fb.hops[-1].push_back(minus);
  }
  return fb;
}

SlabHamiltonian obc_hamiltonian(const ModelSpec& model, int open_axis, int sites,
                                const Momentum& k_perp) {
  if (sites < 1) throw std::invalid_argument("obc_hamiltonian: need at least one site");
  const FourierBlocks fb = fourier_blocks(model, open_axis);
  const int n = model.n;
  SlabHamiltonian s;
  s.open_axis = open_axis;
  s.sites = sites;
  s.k_perp = k_perp;
  s.k_perp[open_axis] = 0.0;
  s.matrix = CMatrix::Zero(n * sites, n * sites);
  const CMatrix T0 = fb.block(0, s.k_perp);
  const CMatrix Tp = fb.block(1, s.k_perp);
  const CMatrix Tm = fb.block(-1, s.k_perp);
  // (H psi)_j = sum_m T_m psi_{j+m}
  for (int j = 0; j < sites; ++j) {
    s.matrix.block(j * n, j * n, n, n) = T0;
    if (j + 1 < sites) s.matrix.block(j * n, (j + 1) * n, n, n) = Tp;
    if (j > 0) s.matrix.block(j * n, (j - 1) * n, n, n) = Tm;
  }
  return s;
}

double edge_weight(const CVector& state, int sites, int width) {
  if (sites < 1 || state.size() % sites != 0)
    throw std::invalid_argument("edge_weight: state length is not a multiple of the site count");
  if (width < 0 || 2 * width >= sites)
    throw std::invalid_argument("edge_weight: boundary width must be below half the site count");
  const int n = static_cast<int>(state.size() / sites);
  const double total = state.squaredNorm();
  if (total == 0.0) return 0.0;
  const double edge = state.head(n * width).squaredNorm() + state.tail(n * width).squaredNorm();
  return edge / total;
}

std::vector<SlabState> slab_spectrum(const SlabHamiltonian& slab, int width) {
  Eigen::ComplexEigenSolver<CMatrix> es(slab.matrix, true);
  if (es.info() != Eigen::Success) throw NumericFailure("slab eigensolver did not converge", slab.matrix);
  // Very thin slabs cannot host the requested boundary width.
  const int w = std::min(width, (slab.sites - 1) / 2);
  std::vector<SlabState> out(slab.matrix.rows());
  for (int i = 0; i < slab.matrix.rows(); ++i) {
    out[i].energy = es.eigenvalues()(i);
    out[i].edge_weight = edge_weight(es.eigenvectors().col(i), slab.sites, w);
  }
  std::stable_sort(out.begin(), out.end(), [](const SlabState& a, const SlabState& b) {
    if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
    return a.energy.imag() < b.energy.imag();
  });
  return out;
}

}  // namespace nhdeg
