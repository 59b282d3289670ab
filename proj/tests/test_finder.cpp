#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nhdeg/finder.hpp"
#include "nhdeg/report.hpp"
#include "nhdeg/sampling.hpp"
#include "nhdeg/simplex.hpp"
#include "nhdeg/spectral.hpp"
#include "test_util.hpp"

using namespace nhdeg;
using testutil::constant_model;

namespace {

const cd I(0, 1);

CMatrix mat2(cd a, cd b, cd c, cd d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double dist3(const Momentum& a, const Momentum& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

std::string dump(const ScanResult& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& rec : r.records) j.push_back(to_json(rec));
  return j.dump();
}

const ScanResult& pt_scan() {
  static const ScanResult r = scan_degeneracies(zoo("pt-weyl-2b"), default_scan_config(2), 2);
  return r;
}

const ScanResult& psh_scan() {
  static const ScanResult r = scan_degeneracies(zoo("psh-dirac-4b"), default_scan_config(4), 4);
  return r;
}

const ScanResult& onp_scan() {
  static const ScanResult r = scan_degeneracies(zoo("onp-2b"), default_scan_config(2), 2);
  return r;
}

}  // namespace

TEST_CASE("degeneracy objective") {
  CHECK(degeneracy_objective(zoo("pt-weyl-2b"), {0, 0, kPi / 2}, 2) < 1e-15);
  CHECK(degeneracy_objective(zoo("psh-dirac-4b"), {0, 0, kPi / 2}, 4) < 1e-15);
  const ModelSpec diag = constant_model(mat2(0, 0, 0, 1));
  CHECK(degeneracy_objective(diag, {0.3, -1, 2}, 2) == doctest::Approx(1.0));

  // order n is the spread of the whole spectrum, order 2 the closest pair
  CMatrix h = CMatrix::Zero(3, 3);
  h.diagonal() << 0, 0.1, 2.0;
  const ModelSpec three = constant_model(h);
  CHECK(degeneracy_objective(three, {0, 0, 0}, 2) == doctest::Approx(0.1));
  CHECK(degeneracy_objective(three, {0, 0, 0}, 3) == doctest::Approx(2.0));
  CHECK(degeneracy_objective(zoo("psh-dirac-4b"), {0.3, 0.3, 1.0}, 2) < 1e-9);
  CHECK(degeneracy_objective(zoo("psh-dirac-4b"), {0.3, 0.3, 1.0}, 4) > 1e-3);
}

TEST_CASE("tightest group") {
  const auto [idx, mean] = tightest_group({0.0, 1.0, 1.1, 5.0}, 2);
  CHECK(idx == std::vector<int>{1, 2});
  CHECK(std::abs(mean - 1.05) < 1e-15);
}

TEST_CASE("cluster defectiveness score") {
  CHECK(cluster_defectiveness(mat2(0, 1, 0, 0)) == 0.0);
  CHECK(cluster_defectiveness(mat2(3, 1, 0, 3)) < 1e-15);
  CHECK(cluster_defectiveness(mat2(2, 0, 0, 2)) == 1.0);
  // traceless diag(1,-1): e2 = -1 and norm 1
  CHECK(cluster_defectiveness(mat2(1, 0, 0, -1)) == doctest::Approx(1.0));
  // nearly nilpotent: [[0,1],[eps,0]] has e2 = -eps
  const double eps = 1e-8;
  CHECK(cluster_defectiveness(mat2(0, 1, eps, 0)) == doctest::Approx(eps).epsilon(1e-6));

  // scale invariance
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const CMatrix b = testutil::random_matrix(rng, 3);
    CHECK(cluster_defectiveness(7.5 * b) == doctest::Approx(cluster_defectiveness(b)).epsilon(1e-9));
  }
}

TEST_CASE("Jordan chain condition") {
  CHECK(jordan_chain_condition(mat2(0, 1, 0, 0)) == doctest::Approx(1.0));
  // chain [N x, x] with N = [[0, a], [0, 0]]: columns a e1 and e2
  CHECK(jordan_chain_condition(mat2(0, 10, 0, 0)) == doctest::Approx(10.0));
  CMatrix j3 = CMatrix::Zero(3, 3);
  j3(0, 1) = j3(1, 2) = 1.0;
  CHECK(jordan_chain_condition(j3) == doctest::Approx(1.0));
}

TEST_CASE("classification examples") {
  const ScanConfig cfg = default_scan_config(2);
  const DegeneracyRecord def = classify_degeneracy(zoo("pt-weyl-2b"), {0, kPi / 2, kPi / 2}, cfg);
  CHECK(def.kind == DegeneracyKind::DefectiveEP);
  CHECK(def.jordan_structure == std::vector<int>{2});
  CHECK(def.diagnostics.defect == 1);
  CHECK(def.order == 2);

  const DegeneracyRecord nd = classify_degeneracy(zoo("pt-weyl-2b"), {0, 0, kPi / 2}, cfg);
  CHECK(nd.kind == DegeneracyKind::NonDefectiveEP);
  CHECK(nd.diagnostics.defect == 0);
  CHECK(nd.jordan_structure == std::vector<int>{1, 1});
  REQUIRE(nd.diagnostics.spheres.size() == 4);
  for (const auto& s : nd.diagnostics.spheres) CHECK(s.max_cond >= cfg.defect_cond_threshold);

  const DegeneracyRecord onp = classify_degeneracy(zoo("onp-2b"), {kPi, kPi, kPi}, cfg);
  CHECK(onp.kind == DegeneracyKind::ONP);
  CHECK_FALSE(onp.diagnostics.ambiguous);
  for (const auto& s : onp.diagnostics.spheres) CHECK(s.max_cond < cfg.defect_cond_threshold);
}

TEST_CASE("record invariants link kind and defect") {
  for (const ScanResult* r : {&pt_scan(), &psh_scan(), &onp_scan()}) {
    for (const auto& rec : r->records) {
      CHECK((rec.kind == DegeneracyKind::DefectiveEP) == (rec.diagnostics.defect > 0));
      if (rec.kind == DegeneracyKind::NonDefectiveEP)
        for (const auto& s : rec.diagnostics.spheres) CHECK(s.max_cond >= 1e6);
      if (rec.kind == DegeneracyKind::ONP)
        for (const auto& s : rec.diagnostics.spheres) CHECK(s.max_cond < 1e6);
    }
  }
}

TEST_CASE("scan of the PT Weyl model") {
  const ScanResult& r = pt_scan();
  REQUIRE(r.records.size() == 2);
  CHECK(dist3(r.records[0].k_star, {0, 0, -kPi / 2}) < 1e-6);
  CHECK(dist3(r.records[1].k_star, {0, 0, kPi / 2}) < 1e-6);
  for (const auto& rec : r.records) {
    CHECK(rec.kind == DegeneracyKind::NonDefectiveEP);
    CHECK(rec.diagnostics.objective < 1e-10);
    CHECK(degeneracy_objective(zoo("pt-weyl-2b"), rec.k_star, 2) < 1e-10);
  }
  CHECK(r.diagnostics.grid_points == 61L * 61 * 61);
  CHECK(r.diagnostics.accepted >= 2);
}

TEST_CASE("scan of the four-band Dirac model") {
  const ScanResult& r = psh_scan();
  REQUIRE(r.records.size() == 2);
  CHECK(dist3(r.records[0].k_star, {0, 0, -kPi / 2}) < 1e-6);
  CHECK(dist3(r.records[1].k_star, {0, 0, kPi / 2}) < 1e-6);
  for (const auto& rec : r.records) {
    CHECK(rec.order == 4);
    CHECK(rec.kind == DegeneracyKind::NonDefectiveEP);
    CHECK(rec.diagnostics.objective < 1e-10);
  }
}

TEST_CASE("scan of the ONP model finds the eight lattice points") {
  const ScanResult& r = onp_scan();
  REQUIRE(r.records.size() == 8);
  for (const auto& rec : r.records) {
    CHECK(rec.kind == DegeneracyKind::ONP);
    for (double x : rec.k_star) CHECK(std::min(std::abs(x), kPi - std::abs(x)) < 1e-6);
  }
  // sorted lexicographically once refinement noise is rounded away
  for (size_t i = 1; i < r.records.size(); ++i) {
    Momentum a = r.records[i - 1].k_star, b = r.records[i].k_star;
    for (double* x : {&a[0], &a[1], &a[2], &b[0], &b[1], &b[2]}) *x = std::round(*x * 1e4);
    CHECK(a < b);
  }
}

TEST_CASE("scan is deterministic across thread counts") {
  ScanConfig cfg = default_scan_config(2);
  cfg.grid = 31;
  cfg.threads = 1;
  const ScanResult a = scan_degeneracies(zoo("pt-weyl-2b"), cfg, 2);
  cfg.threads = 4;
  const ScanResult b = scan_degeneracies(zoo("pt-weyl-2b"), cfg, 2);
  const ScanResult c = scan_degeneracies(zoo("pt-weyl-2b"), cfg, 2);
  CHECK(dump(a) == dump(b));
  CHECK(dump(b) == dump(c));
  CHECK(to_json(a.diagnostics).dump() == to_json(b.diagnostics).dump());
}

TEST_CASE("classification does not change when the probe radii are halved") {
  const std::pair<const char*, const ScanResult*> cases[] = {
      {"pt-weyl-2b", &pt_scan()}, {"psh-dirac-4b", &psh_scan()}, {"onp-2b", &onp_scan()}};
  for (const auto& [name, scan] : cases) {
    const ModelSpec m = zoo(name);
    ScanConfig half = default_scan_config(m.n);
    for (double& r : half.sphere_radii) r /= 2;
    for (const auto& rec : scan->records) CHECK(classify_degeneracy(m, rec.k_star, half).kind == rec.kind);
  }
}

TEST_CASE("Jordan chain condition grows towards the PT Weyl EPs") {
  for (const auto& rec : pt_scan().records) {
    const auto& s = rec.diagnostics.spheres;
    std::string trace;
    for (const auto& p : s) trace += format_double(p.cond_S) + " ";
    MESSAGE("cond_S by radius: " << trace);
    for (size_t i = 1; i < s.size(); ++i) CHECK(s[i].cond_S > s[i - 1].cond_S);
  }
}

TEST_CASE("ONP neighbourhoods are free of defective points") {
  for (const auto& rec : onp_scan().records) {
    double num = 0, den = 0;
    for (const auto& s : rec.diagnostics.spheres) {
      CHECK(s.max_cond < 1e3);
      num += s.min_abs_eta * s.radius * s.radius;
      den += std::pow(s.radius, 4);
    }
    const double c = num / den;
    CHECK(c > 1.0);
    // expansion: |eta| = |4 (1/2 - i)^2| rho^2 = 5 rho^2 to leading order
    for (const auto& s : rec.diagnostics.spheres) CHECK(s.min_abs_eta / (s.radius * s.radius) > 0.5 * c);
  }
}

TEST_CASE("pair count") {
  const ParityReport pt = pair_count_check(pt_scan().records);
  CHECK(pt.nondefective_count == 2);
  CHECK(pt.even);
  REQUIRE(pt.partners.size() == 1);
  CHECK(pt.partners[0] == std::pair{0, 1});
  const ParityReport psh = pair_count_check(psh_scan().records);
  CHECK(psh.nondefective_count == 2);
  CHECK(psh.even);
  const ParityReport none = pair_count_check({});
  CHECK(none.nondefective_count == 0);
  CHECK(none.even);
}

TEST_CASE("scan config validation") {
  ScanConfig c;
  CHECK_NOTHROW(c.validate());
  c.grid = 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ScanConfig{};
  c.sphere_radii = {0.1, 0.2};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ScanConfig{};
  c.defect_cond_threshold = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(default_scan_config(4).grid == 41);
  CHECK(default_scan_config(2).grid == 61);
  CHECK_THROWS_AS(scan_degeneracies(zoo("pt-weyl-2b"), ScanConfig{}, 3), std::invalid_argument);
}

TEST_CASE("zero set of eta_R in the kx = 0 plane") {
  const ModelSpec pt = zoo("pt-weyl-2b");
  const int count = 61;
  const std::vector<Momentum> pts = zero_set_sample(pt, "eta_R", GridSpec::full(count).slice(0, 0.0));
  REQUIRE_FALSE(pts.empty());
  const double h = 2 * kPi / (count - 1);
  double nearest = 1e300;
  for (const auto& p : pts) {
    CHECK(p[0] == 0.0);
    // every emitted point lies on the variety up to interpolation error
    CHECK(std::abs(field_value(pt, "eta_R", p)) < 2.0 * h);
    nearest = std::min(nearest, dist3(p, {0, kPi / 2, kPi / 2}));
  }
  CHECK(nearest < h);
  CHECK(zero_set_sample(pt, "eta_R", GridSpec::full(count).slice(0, 0.0), 4) == pts);
}

TEST_CASE("zero set edge cases") {
  const ModelSpec s3 = constant_model(mat2(1, 0, 0, -1));
  CHECK(zero_set_sample(s3, "d_zR", GridSpec::full(11)).empty());
  CHECK(zero_set_sample(s3, "d_3R", GridSpec::full(11)).empty());
  CHECK_THROWS_AS(zero_set_sample(s3, "eta_X", GridSpec::full(11)), std::invalid_argument);
  CHECK_THROWS_AS(zero_set_sample(s3, "nu_R", GridSpec::full(11)), std::invalid_argument);
  CHECK_NOTHROW(validate_field("kappa_I", 4));
  CHECK(field_value(zoo("pt-weyl-2b"), "d_yI", {0, 0, 0}) == doctest::Approx(2.0));
  CHECK(field_value(zoo("pt-weyl-2b"), "d_2I", {0, 0, 0}) == doctest::Approx(2.0));
}

TEST_CASE("joint zero set of eta stays away from the ONPs") {
  const std::vector<Momentum> cells = joint_zero_cells(zoo("onp-2b"), "eta_R", "eta_I", GridSpec::full(41));
  REQUIRE_FALSE(cells.empty());
  double nearest = 1e300;
  for (const auto& c : cells)
    for (double x : {-kPi, 0.0, kPi})
      for (double y : {-kPi, 0.0, kPi})
        for (double z : {-kPi, 0.0, kPi}) nearest = std::min(nearest, dist3(c, {x, y, z}));
  CHECK(nearest > 0.3);
}

TEST_CASE("Fermi region map") {
  const ModelSpec pt = zoo("pt-weyl-2b");
  // kx = ky = s, kz = pi/2: the real gap closes where eta_R < 0, i.e. cos s < 1/3
  const int cells = 400;
  std::vector<Momentum> path;
  for (int i = 0; i < cells; ++i) {
    const double s = 2 * kPi * (i + 0.5) / cells;
    path.push_back({s, s, kPi / 2});
  }
  const std::vector<FermiLabel> labels = fermi_region_map(pt, path);
  int transitions = 0;
  for (int i = 0; i < cells; ++i) {
    const double s = 2 * kPi * (i + 0.5) / cells;
    if (std::abs(std::cos(s) - 1.0 / 3) > 1e-2)
      CHECK((labels[i] == FermiLabel::ReGapZero) == (std::cos(s) < 1.0 / 3));
    if (i > 0 && labels[i] != labels[i - 1]) ++transitions;
  }
  CHECK(transitions == 2);

  CHECK(fermi_region_map(pt, std::vector<Momentum>{{0, 0, 0}})[0] == FermiLabel::ReGapZero);

  // Hermitian: the real gap closes only at the band touchings of the kz = 0
  // plane. With 19 x 19 cells the only centre on one of them is the origin.
  const std::vector<FermiLabel> herm = fermi_region_map(zoo("edge-2b"), GridSpec::full(20).slice(2, 0.0));
  REQUIRE(herm.size() == 19 * 19);
  CHECK(std::count(herm.begin(), herm.end(), FermiLabel::ReGapZero) == 1);
  CHECK(herm[9 * 19 + 9] == FermiLabel::ReGapZero);

  CHECK_THROWS_AS(fermi_region_map(zoo("psh-dirac-4b"), std::vector<Momentum>{{0, 0, 0}}), UnsupportedError);
}

TEST_CASE("grid spec") {
  GridSpec g = GridSpec::full(5);
  CHECK(g.size() == 125);
  CHECK(g.point(0, 0, 0) == Momentum{-kPi, -kPi, -kPi});
  CHECK(g.point(4, 2, 0)[0] == doctest::Approx(kPi));
  CHECK(g.point(4, 2, 0)[1] == doctest::Approx(0.0).epsilon(1e-15));
  g.slice(1, 0.25);
  CHECK(g.size() == 25);
  CHECK(g.point(3, 0, 1)[1] == 0.25);
}

TEST_CASE("Nelder-Mead") {
  auto rosen = [](const std::vector<double>& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  SimplexOptions opt;
  opt.max_evals = 5000;
  opt.f_target = 1e-20;
  opt.initial_step = 0.5;
  const SimplexResult r = nelder_mead(rosen, {-1.2, 1.0}, opt);
  CHECK(r.f < 1e-12);
  CHECK(std::abs(r.x[0] - 1) < 1e-5);
  CHECK(r.evals <= 5000);

  SimplexOptions tight;
  tight.max_evals = 20;
  const SimplexResult cut = nelder_mead(rosen, {-1.2, 1.0}, tight);
  CHECK(cut.evals <= 20 + 3);
  CHECK_FALSE(cut.reached_target);

  auto bowl = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; };
  SimplexOptions target;
  target.f_target = 1e-6;
  const SimplexResult b = nelder_mead(bowl, {1, 1, 1}, target);
  CHECK(b.reached_target);
  CHECK(b.f <= 1e-6);
}

TEST_CASE("sampling helpers") {
  const Momentum h1 = halton_momentum(1);
  CHECK(h1[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(h1[1] == doctest::Approx(-kPi + 2 * kPi / 3));
  CHECK(h1[2] == doctest::Approx(-kPi + 2 * kPi / 5));
  for (long i = 1; i < 1000; ++i)
    for (double x : halton_momentum(i)) CHECK((x >= -kPi && x < kPi));

  for (const auto& d : fibonacci_sphere(200)) CHECK(std::hypot(d[0], d[1], d[2]) == doctest::Approx(1.0));

  const Momentum w = wrap_momentum({kPi, 3 * kPi / 2, -kPi});
  CHECK(w[0] == doctest::Approx(-kPi));
  CHECK(w[1] == doctest::Approx(-kPi / 2));
  CHECK(w[2] == doctest::Approx(-kPi));
  CHECK(torus_distance({kPi - 0.01, 0, 0}, {-kPi + 0.01, 0, 0}) == doctest::Approx(0.02));
  CHECK(torus_distance({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}) == 0.0);
}

TEST_CASE("parallel_for visits each index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](long i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](long i) {
                                 if (i == 57) throw std::runtime_error("x");
                               }),
                  std::runtime_error);
}
