#include "nhdeg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nhdeg {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& opt) {
  const size_t dim = x0.size();
  SimplexResult res;
  std::vector<std::vector<double>> pts(dim + 1, x0);
  std::vector<double> vals(dim + 1);
  for (size_t i = 0; i < dim; ++i) pts[i + 1][i] += opt.initial_step;

  auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    return f(x);
  };
  for (size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

  std::vector<size_t> order(dim + 1);
  auto point = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double coef) {
    std::vector<double> p(dim);
    for (size_t j = 0; j < dim; ++j) p[j] = centroid[j] + coef * (worst[j] - centroid[j]);
    return p;
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    const size_t best = order.front(), worst = order.back(), second = order[dim - 1];
    if (vals[best] <= opt.f_target) {
      res.reached_target = true;
      break;
    }
    double diameter = 0.0;
    for (size_t i = 0; i <= dim; ++i)
      for (size_t j = 0; j < dim; ++j) diameter = std::max(diameter, std::abs(pts[i][j] - pts[best][j]));
    if (diameter < opt.x_tol || res.evals >= opt.max_evals) break;

    std::vector<double> centroid(dim, 0.0);
    for (size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j] / double(dim);
    }

    const std::vector<double> xr = point(centroid, pts[worst], -1.0);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const std::vector<double> xe = point(centroid, pts[worst], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    // Contract towards the better of the reflected and worst points.
    const bool outside = fr < vals[worst];
    const std::vector<double> xc = point(centroid, outside ? xr : pts[worst], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (size_t j = 0; j < dim; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      vals[i] = eval(pts[i]);
    }
  }
  const size_t best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  res.x = pts[best];
  res.f = vals[best];
  return res;
}

}  // namespace nhdeg
