#include "nhdeg/finder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "nhdeg/sampling.hpp"
#include "nhdeg/simplex.hpp"
#include "nhdeg/spectral.hpp"

namespace nhdeg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double spectral_norm(const CMatrix& M) {
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

CMatrix traceless(const CMatrix& B) {
  const long m = B.rows();
  return B - (B.trace() / double(m)) * CMatrix::Identity(m, m);
}

// Block of the m eigenvalues nearest `center` (the whole matrix when m = n).
CMatrix cluster_block(const CMatrix& H, cd center, int m) {
  return m == H.rows() ? H : schur_cluster_block(H, center, m);
}

// Largest single-linkage cluster of the spectrum (smallest spread on ties).
std::pair<std::vector<int>, cd> dominant_cluster(const std::vector<cd>& ev, double radius) {
  std::vector<int> best;
  double best_spread = kInf;
  for (size_t i = 0; i < ev.size(); ++i) {
    std::vector<int> cl = eigenvalue_cluster(ev, ev[i], radius);
    double spread = 0.0;
    for (int a : cl)
      for (int b : cl) spread = std::max(spread, std::abs(ev[a] - ev[b]));
    if (cl.size() > best.size() || (cl.size() == best.size() && spread < best_spread)) {
      best = cl;
      best_spread = spread;
    }
  }
  cd mean = 0.0;
  for (int i : best) mean += ev[i];
  return {best, mean / double(best.size())};
}

Momentum offset(const Momentum& k, const std::array<double, 3>& dir, double rho) {
  return {k[0] + rho * dir[0], k[1] + rho * dir[1], k[2] + rho * dir[2]};
}

std::array<double, 3> polar_direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

bool lex_less(const Momentum& a, const Momentum& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Lexicographic order that ignores refinement noise: components closer than
// 1e-6 count as equal. Kept points are cluster_radius apart, so this is a
// strict weak order on them.
bool lex_less_coarse(const Momentum& a, const Momentum& b) {
  for (int i = 0; i < 3; ++i)
    if (std::abs(a[i] - b[i]) > 1e-6) return a[i] < b[i];
  return false;
}

}  // namespace

std::string kind_name(DegeneracyKind kind) {
  switch (kind) {
    case DegeneracyKind::DefectiveEP: return "defective_ep";
    case DegeneracyKind::NonDefectiveEP: return "non_defective_ep";
    default: return "onp";
  }
}

void ScanConfig::validate() const {
  if (grid < 3) throw std::invalid_argument("scan config: grid must be at least 3");
  if (!(refine_tol > 0) || !(cluster_radius > 0) || !(defect_cond_threshold > 0) || !(rank_tol > 0))
    throw std::invalid_argument("scan config: tolerances and thresholds must be positive");
  if (sphere_radii.empty()) throw std::invalid_argument("scan config: need at least one sphere radius");
  for (size_t i = 0; i < sphere_radii.size(); ++i) {
    if (!(sphere_radii[i] > 0)) throw std::invalid_argument("scan config: sphere radii must be positive");
    if (i > 0 && !(sphere_radii[i] < sphere_radii[i - 1]))
      throw std::invalid_argument("scan config: sphere radii must be strictly decreasing");
  }
  if (directions_per_sphere < 1) throw std::invalid_argument("scan config: need at least one direction");
  if (max_evals < 1) throw std::invalid_argument("scan config: evaluation budget must be positive");
  if (threads < 1) throw std::invalid_argument("scan config: threads must be at least 1");
}

ScanConfig default_scan_config(int bands) {
  ScanConfig c;
  if (bands == 4) c.grid = 41;
  return c;
}

std::pair<std::vector<int>, cd> tightest_group(const std::vector<cd>& ev, int m) {
  const int n = static_cast<int>(ev.size());
  if (m < 1 || m > n) throw std::invalid_argument("tightest_group: bad group size");
  std::vector<int> best;
  double best_diam = kInf;
  for (int a = 0; a < n; ++a) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int x, int y) { return std::abs(ev[x] - ev[a]) < std::abs(ev[y] - ev[a]); });
    idx.resize(m);
    double diam = 0.0;
    for (int x : idx)
      for (int y : idx) diam = std::max(diam, std::abs(ev[x] - ev[y]));
    if (diam < best_diam) {
      best_diam = diam;
      best = idx;
    }
  }
  std::sort(best.begin(), best.end());
  cd mean = 0.0;
  for (int i : best) mean += ev[i];
  return {best, mean / double(m)};
}

double degeneracy_objective(const ModelSpec& model, const Momentum& k, int order_target) {
  if (order_target < 2 || order_target > model.n)
    throw std::invalid_argument("degeneracy_objective: order must lie in [2, n]");
  const std::vector<cd> ev = eigenvalues(eval_bloch(model, k));
  if (order_target == model.n) return max_gap(ev);
  if (order_target == 2) return min_gap(ev);
  const auto [idx, mean] = tightest_group(ev, order_target);
  double diam = 0.0;
  for (int x : idx)
    for (int y : idx) diam = std::max(diam, std::abs(ev[x] - ev[y]));
  return diam;
}

double cluster_defectiveness(const CMatrix& block) {
  const int m = static_cast<int>(block.rows());
  if (m < 2) return 1.0;
  const CMatrix N = traceless(block);
  const double norm = spectral_norm(N);
  if (norm == 0.0) return 1.0;
  // Newton identities from power traces of the scaled block.
  const CMatrix Ns = N / norm;
  std::vector<cd> p(m + 1), e(m + 1);
  CMatrix P = CMatrix::Identity(m, m);
  for (int j = 1; j <= m; ++j) {
    P = P * Ns;
    p[j] = P.trace();
  }
  e[0] = 1.0;
  double score = 0.0;
  for (int j = 1; j <= m; ++j) {
    cd s = 0.0;
    for (int i = 1; i <= j; ++i) s += ((i % 2 == 1) ? 1.0 : -1.0) * e[j - i] * p[i];
    e[j] = s / double(j);
    if (j >= 2) score = std::max(score, std::abs(e[j]));
  }
  return score;
}

double jordan_chain_condition(const CMatrix& block) {
  const int m = static_cast<int>(block.rows());
  const CMatrix N = traceless(block);
  const double norm = spectral_norm(N);
  if (m < 2 || norm == 0.0) return 1.0;
  // Numerical nilpotency index: first power that is negligible relative to
  // the matching power of the norm.
  std::vector<CMatrix> powers{CMatrix::Identity(m, m)};
  int index = m;
  for (int j = 1; j <= m; ++j) {
    powers.push_back(powers.back() * N);
    if (spectral_norm(powers.back()) <= 1e-6 * std::pow(norm, j)) {
      index = j;
      break;
    }
  }
  if (index == 1) return 1.0;
  while (static_cast<int>(powers.size()) < index) powers.push_back(powers.back() * N);
  Eigen::JacobiSVD<CMatrix> top(powers[index - 1], Eigen::ComputeFullV);
  const CVector x = top.matrixV().col(0);
  CMatrix S(m, index);
  for (int j = 0; j < index; ++j) S.col(j) = powers[index - 1 - j] * x;
  Eigen::JacobiSVD<CMatrix> svd(S);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0 ? sv(0) / smin : kInf;
}

DegeneracyRecord classify_degeneracy(const ModelSpec& model, const Momentum& k_star, const ScanConfig& config) {
  config.validate();
  const CMatrix H = eval_bloch(model, k_star);
  const std::vector<cd> ev = eigenvalues(H);
  const double radius = std::max(cluster_radius(H, config.rank_tol), 1e2 * config.refine_tol);
  const auto [cluster, centre] = dominant_cluster(ev, radius);
  const int m = static_cast<int>(cluster.size());

  DegeneracyRecord rec;
  rec.k_star = k_star;
  rec.eigenvalue = centre;
  rec.order = m;
  rec.diagnostics.objective = m >= 2 ? degeneracy_objective(model, k_star, m) : min_gap(ev);
  const MultiplicityStructure ms = multiplicity_structure(H, centre, config.rank_tol);
  rec.diagnostics.defect = diagonalizability_defect(H, config.rank_tol);
  if (rec.diagnostics.defect > 0) {
    rec.kind = DegeneracyKind::DefectiveEP;
    rec.jordan_structure = ms.jordan_blocks();
    return rec;
  }
  rec.jordan_structure.assign(m, 1);
  if (m < 2) {
    rec.kind = DegeneracyKind::ONP;
    return rec;
  }

  const auto dirs = fibonacci_sphere(config.directions_per_sphere);
  auto score_at = [&](const Momentum& k) {
    return cluster_defectiveness(cluster_block(eval_bloch(model, k), centre, m));
  };
  for (double rho : config.sphere_radii) {
    SphereProbe probe;
    probe.radius = rho;
    probe.min_abs_eta = kInf;
    std::vector<double> scores(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) {
      const Momentum k = offset(k_star, dirs[i], rho);
      const CMatrix Hk = eval_bloch(model, k);
      scores[i] = cluster_defectiveness(cluster_block(Hk, centre, m));
      probe.min_abs_eta = std::min(probe.min_abs_eta, std::abs(discriminant_constraints(Hk).eta));
    }
    std::vector<size_t> order(dirs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
    double best = scores[order[0]];
    Momentum best_k = offset(k_star, dirs[order[0]], rho);
    // Polish the most defective-looking directions over the sphere.
    const size_t polish = std::min<size_t>(5, order.size());
    for (size_t r = 0; r < polish; ++r) {
      const auto& d = dirs[order[r]];
      const std::vector<double> start{std::acos(std::clamp(d[2], -1.0, 1.0)), std::atan2(d[1], d[0])};
      SimplexOptions opt;
      opt.max_evals = config.max_evals;
      opt.initial_step = 0.15;
      const SimplexResult res = nelder_mead(
          [&](const std::vector<double>& a) { return score_at(offset(k_star, polar_direction(a[0], a[1]), rho)); },
          start, opt);
      if (res.f < best) {
        best = res.f;
        best_k = offset(k_star, polar_direction(res.x[0], res.x[1]), rho);
      }
    }
    probe.min_score = best;
    probe.max_cond = best > 0 ? 1.0 / std::sqrt(best) : kInf;
    probe.best_k = best_k;
    probe.cond_S = jordan_chain_condition(cluster_block(eval_bloch(model, best_k), centre, m));
    probe.defective_direction = probe.max_cond >= config.defect_cond_threshold;
    rec.diagnostics.spheres.push_back(probe);
  }

  const auto& sp = rec.diagnostics.spheres;
  const bool all = std::all_of(sp.begin(), sp.end(), [](const SphereProbe& p) { return p.defective_direction; });
  const bool none = std::none_of(sp.begin(), sp.end(), [](const SphereProbe& p) { return p.defective_direction; });
  rec.diagnostics.ambiguous = !all && !none;
  // Ambiguous outcomes follow the smallest radius.
  rec.kind = sp.back().defective_direction ? DegeneracyKind::NonDefectiveEP : DegeneracyKind::ONP;
  return rec;
}

ScanResult scan_degeneracies(const ModelSpec& model, const ScanConfig& config, int order_target) {
  config.validate();
  if (order_target < 2 || order_target > model.n)
    throw std::invalid_argument("scan_degeneracies: order must lie in [2, n]");
  const int G = config.grid;
  const double h = 2.0 * kPi / G;
  const long total = static_cast<long>(G) * G * G;
  auto coord = [&](long idx) {
    return Momentum{-kPi + h * static_cast<double>(idx / (G * G)), -kPi + h * static_cast<double>((idx / G) % G),
                    -kPi + h * static_cast<double>(idx % G)};
  };
  auto neighbour = [&](long idx, int dx, int dy, int dz) {
    const long i = (idx / (G * G) + dx + G) % G, j = ((idx / G) % G + dy + G) % G, l = (idx % G + dz + G) % G;
    return (i * G + j) * G + l;
  };

  ScanResult out;
  out.diagnostics.grid_points = total;
  std::vector<double> vals(total);
  parallel_for(total, config.threads, [&](long i) { vals[i] = degeneracy_objective(model, coord(i), order_target); });

  // Grid-adaptive acceptance threshold from the steepest axis slope.
  double slope = 0.0;
  for (long i = 0; i < total; ++i)
    for (int a = 0; a < 3; ++a) {
      const long q = neighbour(i, a == 0, a == 1, a == 2);
      slope = std::max(slope, std::abs(vals[q] - vals[i]) / h);
    }
  const double threshold = slope * h * std::sqrt(3.0);

  std::vector<long> seeds;
  for (long i = 0; i < total; ++i) {
    if (vals[i] > threshold) continue;
    bool minimum = true;
    for (int dx = -1; dx <= 1 && minimum; ++dx)
      for (int dy = -1; dy <= 1 && minimum; ++dy)
        for (int dz = -1; dz <= 1 && minimum; ++dz) {
          if (!dx && !dy && !dz) continue;
          const long q = neighbour(i, dx, dy, dz);
          if (vals[q] < vals[i] || (vals[q] == vals[i] && q < i)) minimum = false;
        }
    if (minimum) seeds.push_back(i);
  }
  out.diagnostics.seeds = static_cast<int>(seeds.size());

  enum class Outcome { Accepted, Defective, Dropped };
  struct Candidate {
    Momentum k{};
    double objective = kInf;
    Outcome outcome = Outcome::Dropped;
  };
  std::vector<Candidate> cand(seeds.size());

  auto objective_vec = [&](const std::vector<double>& x) {
    return degeneracy_objective(model, {x[0], x[1], x[2]}, order_target);
  };
  // Zero only where the targeted cluster collapses to a multiple of identity.
  auto collapse_vec = [&](const std::vector<double>& x) {
    const CMatrix H = eval_bloch(model, {x[0], x[1], x[2]});
    if (order_target == model.n) return traceless(H).norm();
    const auto [idx, mean] = tightest_group(eigenvalues(H), order_target);
    return traceless(schur_cluster_block(H, mean, order_target)).norm();
  };
  auto diagonalizable = [&](const Momentum& k) {
    return diagonalizability_defect(eval_bloch(model, k), config.rank_tol) == 0;
  };

  parallel_for(static_cast<long>(seeds.size()), config.threads, [&](long s) {
    const Momentum k0 = coord(seeds[s]);
    SimplexOptions opt;
    opt.max_evals = config.max_evals;
    opt.f_target = config.refine_tol;
    opt.initial_step = h;
    const SimplexResult first = nelder_mead(objective_vec, {k0[0], k0[1], k0[2]}, opt);
    const Momentum k1{first.x[0], first.x[1], first.x[2]};
    Candidate& c = cand[s];
    if (first.f <= config.refine_tol && diagonalizable(k1)) {
      c = {k1, first.f, Outcome::Accepted};
      return;
    }
    SimplexOptions polish = opt;
    polish.f_target = 1e-2 * config.refine_tol;
    const SimplexResult second = nelder_mead(collapse_vec, first.x, polish);
    const Momentum k2{second.x[0], second.x[1], second.x[2]};
    const double f2 = degeneracy_objective(model, k2, order_target);
    if (f2 <= config.refine_tol && diagonalizable(k2)) {
      c = {k2, f2, Outcome::Accepted};
    } else if (first.f <= config.refine_tol) {
      c = {k1, first.f, Outcome::Defective};
    }
  });

  std::vector<Candidate> pool;
  for (const Candidate& c : cand) {
    if (c.outcome == Outcome::Accepted) {
      ++out.diagnostics.accepted;
      pool.push_back(c);
    } else if (c.outcome == Outcome::Defective) {
      ++out.diagnostics.defective_landings;
      if (config.include_defective) pool.push_back(c);
    } else {
      ++out.diagnostics.dropped;
    }
  }
  for (Candidate& c : pool) {
    c.k = wrap_momentum(c.k);
    // points refined onto the zone boundary from below belong to -pi
    for (double& x : c.k)
      if (x > kPi - 1e-9) x -= 2 * kPi;
  }
  std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    return lex_less(a.k, b.k);
  });
  std::vector<Candidate> kept;
  for (const Candidate& c : pool) {
    const bool near = std::any_of(kept.begin(), kept.end(), [&](const Candidate& o) {
      return torus_distance(o.k, c.k) < config.cluster_radius;
    });
    if (near) ++out.diagnostics.merged;
    else kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return lex_less_coarse(a.k, b.k); });

  out.records.resize(kept.size());
  parallel_for(static_cast<long>(kept.size()), config.threads,
               [&](long i) { out.records[i] = classify_degeneracy(model, kept[i].k, config); });
  return out;
}

ParityReport pair_count_check(const std::vector<DegeneracyRecord>& records) {
  ParityReport rep;
  std::vector<int> nd;
  for (size_t i = 0; i < records.size(); ++i)
    if (records[i].kind == DegeneracyKind::NonDefectiveEP) nd.push_back(static_cast<int>(i));
  rep.nondefective_count = static_cast<int>(nd.size());
  rep.even = nd.size() % 2 == 0;
  std::vector<char> used(nd.size(), 0);
  for (size_t a = 0; a < nd.size(); ++a) {
    if (used[a]) continue;
    const Momentum& ka = records[nd[a]].k_star;
    for (size_t b = a + 1; b < nd.size(); ++b) {
      if (used[b]) continue;
      const Momentum& kb = records[nd[b]].k_star;
      if (torus_distance(ka, {-kb[0], -kb[1], -kb[2]}) < 1e-4) {
        rep.partners.emplace_back(nd[a], nd[b]);
        used[a] = used[b] = 1;
        break;
      }
    }
  }
  return rep;
}

}  // namespace nhdeg
