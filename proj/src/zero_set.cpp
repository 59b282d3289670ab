#include "nhdeg/finder.hpp"

#include <cmath>
#include <regex>

#include "nhdeg/generator_basis.hpp"
#include "nhdeg/sampling.hpp"
#include "nhdeg/spectral.hpp"

namespace nhdeg {

namespace {

const char* const kPauliAxis = "xyz";

double spectral_radius(const std::vector<cd>& ev) {
  double r = 0.0;
  for (cd z : ev) r = std::max(r, std::abs(z));
  return r;
}

// Gap between the two closest eigenvalues.
cd closest_pair_gap(const std::vector<cd>& ev) {
  const auto [idx, mean] = tightest_group(ev, 2);
  return ev[idx[1]] - ev[idx[0]];
}

double gap_tolerance(const std::vector<cd>& ev) { return 1e-8 * (1.0 + spectral_radius(ev)); }

struct FieldRef {
  enum Kind { Coefficient, Eta, Nu, Kappa, ReGap, ImGap } kind;
  int mu = 0;
  bool imag = false;
};

FieldRef parse_field(const std::string& field, int bands) {
  static const std::regex coeff(R"(d_(\d+|[xyz])([RI]))");
  static const std::regex disc(R"((eta|nu|kappa)_([RI]))");
  std::smatch m;
  if (std::regex_match(field, m, coeff)) {
    int mu;
    const std::string idx = m[1];
    if (idx.size() == 1 && std::isalpha(static_cast<unsigned char>(idx[0]))) {
      if (bands != 2) throw std::invalid_argument("");
      mu = 1 + static_cast<int>(std::string(kPauliAxis).find(idx[0]));
    } else {
      mu = std::stoi(idx);
    }
    if (mu < 0 || mu >= bands * bands) throw std::invalid_argument("");
    return {FieldRef::Coefficient, mu, m[2] == "I"};
  }
  if (std::regex_match(field, m, disc)) {
    const std::string what = m[1];
    if (what == "nu" && bands < 3) throw std::invalid_argument("");
    if (what == "kappa" && bands < 4) throw std::invalid_argument("");
    const FieldRef::Kind kind = what == "eta" ? FieldRef::Eta : what == "nu" ? FieldRef::Nu : FieldRef::Kappa;
    return {kind, 0, m[2] == "I"};
  }
  if (field == "re_gap") return {FieldRef::ReGap};
  if (field == "im_gap") return {FieldRef::ImGap};
  throw std::invalid_argument("");
}

double part(cd z, bool imag) { return imag ? z.imag() : z.real(); }

double evaluate(const ModelSpec& model, const FieldRef& f, const Momentum& k) {
  const CMatrix H = eval_bloch(model, k);
  switch (f.kind) {
    case FieldRef::Coefficient: return part(decompose(H).d[f.mu], f.imag);
    case FieldRef::Eta: return part(discriminant_constraints(H).eta, f.imag);
    case FieldRef::Nu: return part(*discriminant_constraints(H).nu, f.imag);
    case FieldRef::Kappa: return part(*discriminant_constraints(H).kappa, f.imag);
    case FieldRef::ReGap:
    case FieldRef::ImGap: {
      // Signed distance of |Re gap| (|Im gap|) from the vanishing tolerance,
      // so the boundary of the region where that part vanishes is a zero.
      const std::vector<cd> ev = eigenvalues(H);
      const cd g = closest_pair_gap(ev);
      const double v = f.kind == FieldRef::ReGap ? std::abs(g.real()) : std::abs(g.imag());
      return v - gap_tolerance(ev);
    }
  }
  return 0.0;
}

std::vector<double> sample(const ModelSpec& model, const FieldRef& f, const GridSpec& grid, int threads) {
  const int ny = grid.axes[1].count, nz = grid.axes[2].count;
  std::vector<double> v(grid.size());
  parallel_for(grid.size(), threads, [&](long idx) {
    const int i = static_cast<int>(idx / (static_cast<long>(ny) * nz));
    const int j = static_cast<int>((idx / nz) % ny);
    const int l = static_cast<int>(idx % nz);
    v[idx] = evaluate(model, f, grid.point(i, j, l));
  });
  return v;
}

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

GridSpec GridSpec::full(int count) {
  GridSpec g;
  for (auto& a : g.axes) a = {-kPi, kPi, count};
  return g;
}

GridSpec& GridSpec::slice(int axis, double value) {
  axes.at(axis) = {value, value, 1};
  return *this;
}

long GridSpec::size() const {
  return static_cast<long>(axes[0].count) * axes[1].count * axes[2].count;
}

Momentum GridSpec::point(int i, int j, int l) const {
  const int idx[3] = {i, j, l};
  Momentum k;
  for (int a = 0; a < 3; ++a) {
    const GridAxis& ax = axes[a];
    k[a] = ax.count == 1 ? ax.lo : ax.lo + (ax.hi - ax.lo) * idx[a] / double(ax.count - 1);
  }
  return k;
}

std::vector<std::string> field_names(int bands) {
  std::vector<std::string> names;
  for (int mu = 0; mu < bands * bands; ++mu)
    for (const char* p : {"R", "I"}) names.push_back("d_" + std::to_string(mu) + p);
  if (bands == 2)
    for (char a : std::string(kPauliAxis))
      for (const char* p : {"R", "I"}) names.push_back(std::string("d_") + a + p);
  for (const char* p : {"_R", "_I"}) names.push_back(std::string("eta") + p);
  if (bands >= 3)
    for (const char* p : {"_R", "_I"}) names.push_back(std::string("nu") + p);
  if (bands >= 4)
    for (const char* p : {"_R", "_I"}) names.push_back(std::string("kappa") + p);
  names.push_back("re_gap");
  names.push_back("im_gap");
  return names;
}

void validate_field(const std::string& field, int bands) {
  try {
    parse_field(field, bands);
  } catch (const std::invalid_argument&) {
    std::string list;
    for (const std::string& n : field_names(bands)) list += (list.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown field '" + field + "' for " + std::to_string(bands) +
                                "-band models; valid fields: " + list);
  }
}

double field_value(const ModelSpec& model, const std::string& field, const Momentum& k) {
  validate_field(field, model.n);
  return evaluate(model, parse_field(field, model.n), k);
}

std::vector<Momentum> zero_set_sample(const ModelSpec& model, const std::string& field, const GridSpec& grid,
                                      int threads) {
  validate_field(field, model.n);
  const std::vector<double> v = sample(model, parse_field(field, model.n), grid, threads);
  const int n[3] = {grid.axes[0].count, grid.axes[1].count, grid.axes[2].count};
  const long stride[3] = {static_cast<long>(n[1]) * n[2], n[2], 1};
  std::vector<Momentum> pts;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int l = 0; l < n[2]; ++l) {
        const int at[3] = {i, j, l};
        const long p = i * stride[0] + j * stride[1] + l;
        const Momentum kp = grid.point(i, j, l);
        if (v[p] == 0.0) {
          // An exact zero counts only where the field crosses through it.
          for (int a = 0; a < 3; ++a) {
            if (at[a] == 0 || at[a] + 1 >= n[a]) continue;
            if (sign(v[p - stride[a]]) * sign(v[p + stride[a]]) < 0) {
              pts.push_back(kp);
              break;
            }
          }
        }
        for (int a = 0; a < 3; ++a) {
          if (at[a] + 1 >= n[a]) continue;
          const long q = p + stride[a];
          if (sign(v[p]) * sign(v[q]) >= 0) continue;
          const double t = v[p] / (v[p] - v[q]);
          int next[3] = {i, j, l};
          ++next[a];
          const Momentum kq = grid.point(next[0], next[1], next[2]);
          pts.push_back({kp[0] + t * (kq[0] - kp[0]), kp[1] + t * (kq[1] - kp[1]), kp[2] + t * (kq[2] - kp[2])});
        }
      }
  return pts;
}

std::vector<Momentum> joint_zero_cells(const ModelSpec& model, const std::string& field_a,
                                       const std::string& field_b, const GridSpec& grid, int threads) {
  validate_field(field_a, model.n);
  validate_field(field_b, model.n);
  const std::vector<double> va = sample(model, parse_field(field_a, model.n), grid, threads);
  const std::vector<double> vb = sample(model, parse_field(field_b, model.n), grid, threads);
  const int n[3] = {grid.axes[0].count, grid.axes[1].count, grid.axes[2].count};
  const long stride[3] = {static_cast<long>(n[1]) * n[2], n[2], 1};
  // Cells extend one step along every axis with more than one sample.
  const int span[3] = {n[0] > 1, n[1] > 1, n[2] > 1};
  auto changes = [&](const std::vector<double>& v, int i, int j, int l) {
    bool pos = false, neg = false;
    for (int di = 0; di <= span[0]; ++di)
      for (int dj = 0; dj <= span[1]; ++dj)
        for (int dl = 0; dl <= span[2]; ++dl) {
          const double x = v[(i + di) * stride[0] + (j + dj) * stride[1] + (l + dl)];
          pos |= x > 0;
          neg |= x < 0;
        }
    return pos && neg;
  };
  std::vector<Momentum> cells;
  for (int i = 0; i + span[0] < n[0]; ++i)
    for (int j = 0; j + span[1] < n[1]; ++j)
      for (int l = 0; l + span[2] < n[2]; ++l) {
        if (!changes(va, i, j, l) || !changes(vb, i, j, l)) continue;
        const Momentum lo = grid.point(i, j, l);
        const Momentum hi = grid.point(i + span[0], j + span[1], l + span[2]);
        cells.push_back({(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2});
      }
  return cells;
}

std::vector<FermiLabel> fermi_region_map(const ModelSpec& model, const std::vector<Momentum>& cells) {
  if (model.n != 2) throw UnsupportedError("fermi_region_map: only two-band models are supported");
  std::vector<FermiLabel> labels;
  labels.reserve(cells.size());
  for (const Momentum& k : cells) {
    const std::vector<cd> ev = eigenvalues(eval_bloch(model, k));
    const bool zero = std::abs((ev[1] - ev[0]).real()) <= gap_tolerance(ev);
    labels.push_back(zero ? FermiLabel::ReGapZero : FermiLabel::ReGapNonzero);
  }
  return labels;
}

std::vector<FermiLabel> fermi_region_map(const ModelSpec& model, const GridSpec& grid) {
  std::vector<Momentum> centres;
  const int n[3] = {grid.axes[0].count, grid.axes[1].count, grid.axes[2].count};
  const int span[3] = {n[0] > 1, n[1] > 1, n[2] > 1};
  for (int i = 0; i + span[0] < n[0]; ++i)
    for (int j = 0; j + span[1] < n[1]; ++j)
      for (int l = 0; l + span[2] < n[2]; ++l) {
        const Momentum lo = grid.point(i, j, l);
        const Momentum hi = grid.point(i + span[0], j + span[1], l + span[2]);
        centres.push_back({(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2});
      }
  return fermi_region_map(model, centres);
}

}  // namespace nhdeg
