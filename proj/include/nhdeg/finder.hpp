#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nhdeg/model.hpp"

namespace nhdeg {

enum class DegeneracyKind { DefectiveEP, NonDefectiveEP, ONP };

// "defective_ep", "non_defective_ep", "onp"
std::string kind_name(DegeneracyKind kind);

struct ScanConfig {
  int grid = 61;
  double refine_tol = 1e-10;
  double cluster_radius = 0.05;
  std::vector<double> sphere_radii{0.2, 0.1, 0.05, 0.02};
  int directions_per_sphere = 200;
  double defect_cond_threshold = 1e6;
  int max_evals = 500;        // simplex budget per refinement
  double rank_tol = 1e-8;     // numerical rank cutoff for defect tests
  int threads = 1;
  bool include_defective = false;  // also report defective landings of the scan

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// Spec defaults, with the coarser 41-point grid for four-band models.
ScanConfig default_scan_config(int bands);

struct SphereProbe {
  double radius = 0.0;
  double max_cond = 0.0;        // largest cluster condition estimate found
  double min_score = 0.0;       // smallest defectiveness score found
  Momentum best_k{};            // where max_cond was found
  double cond_S = 0.0;          // Jordan-chain condition at best_k
  double min_abs_eta = 0.0;     // min |eta| over the sampled directions
  bool defective_direction = false;
};

struct DegeneracyDiagnostics {
  double objective = 0.0;
  int defect = 0;
  std::vector<SphereProbe> spheres;
  bool ambiguous = false;
};

struct DegeneracyRecord {
  Momentum k_star{};
  cd eigenvalue;
  int order = 0;
  DegeneracyKind kind = DegeneracyKind::ONP;
  std::vector<int> jordan_structure;
  DegeneracyDiagnostics diagnostics;
};

struct ScanDiagnostics {
  long grid_points = 0;
  int seeds = 0;
  int accepted = 0;
  int defective_landings = 0;
  int dropped = 0;
  int merged = 0;
};

struct ScanResult {
  std::vector<DegeneracyRecord> records;
  ScanDiagnostics diagnostics;
};

// Indices of the `m` eigenvalues forming the tightest group (smallest
// diameter), together with their mean.
std::pair<std::vector<int>, cd> tightest_group(const std::vector<cd>& ev, int m);

// Diameter of the tightest group of order_target eigenvalues: max pairwise
// gap for order_target = n, min pairwise gap for order_target = 2.
double degeneracy_objective(const ModelSpec& model, const Momentum& k, int order_target);

// Scale-free defectiveness score of a cluster block B: with N the traceless
// part, max_{j>=2} |e_j(N)| / ||N||_2^j. Zero iff N is nonzero nilpotent;
// 1 for N = 0. The cluster condition estimate is score^{-1/2}.
double cluster_defectiveness(const CMatrix& block);

// Condition number of the Jordan chain [N^{p-1}x, ..., Nx, x] of the traceless
// part of B, with p its numerical nilpotency index.
double jordan_chain_condition(const CMatrix& block);

ScanResult scan_degeneracies(const ModelSpec& model, const ScanConfig& config, int order_target);

DegeneracyRecord classify_degeneracy(const ModelSpec& model, const Momentum& k_star, const ScanConfig& config);

struct ParityReport {
  int nondefective_count = 0;
  bool even = true;
  std::vector<std::pair<int, int>> partners;  // record indices with k_i = -k_j
};

ParityReport pair_count_check(const std::vector<DegeneracyRecord>& records);

// ---- constraint varieties and Fermi regions ----

struct GridAxis {
  double lo = -kPi;
  double hi = kPi;
  int count = 61;
};

// Inclusive per-axis sampling; count 1 pins the axis at lo.
struct GridSpec {
  std::array<GridAxis, 3> axes;
  static GridSpec full(int count);
  GridSpec& slice(int axis, double value);
  long size() const;
  Momentum point(int i, int j, int l) const;
};

std::vector<std::string> field_names(int bands);
// Throws std::invalid_argument naming the valid fields.
void validate_field(const std::string& field, int bands);
double field_value(const ModelSpec& model, const std::string& field, const Momentum& k);

// Linearly interpolated sign changes along grid edges, in grid order.
std::vector<Momentum> zero_set_sample(const ModelSpec& model, const std::string& field, const GridSpec& grid,
                                      int threads = 1);

// Centres of grid cells in which both fields strictly change sign.
std::vector<Momentum> joint_zero_cells(const ModelSpec& model, const std::string& field_a,
                                       const std::string& field_b, const GridSpec& grid, int threads = 1);

enum class FermiLabel { ReGapZero, ReGapNonzero };

// Labels each momentum by whether Re(l1 - l2) vanishes. Two-band only.
std::vector<FermiLabel> fermi_region_map(const ModelSpec& model, const std::vector<Momentum>& cells);
// Labels grid cell centres in grid order.
std::vector<FermiLabel> fermi_region_map(const ModelSpec& model, const GridSpec& grid);

}  // namespace nhdeg
