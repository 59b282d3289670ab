#pragma once

#include <functional>
#include <vector>

namespace nhdeg {

struct SimplexOptions {
  int max_evals = 500;
  double f_target = 0.0;     // stop once the best value is at or below this
  double x_tol = 1e-14;      // stop once the simplex diameter falls below this
  double initial_step = 0.1;
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool reached_target = false;
};

// Nelder-Mead with reflection 1, expansion 2, contraction 1/2, shrink 1/2.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& opt = {});

}  // namespace nhdeg
