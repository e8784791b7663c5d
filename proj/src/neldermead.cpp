#include "viraltrace/neldermead.hpp"

#include <algorithm>
#include <cmath>

#include "viraltrace/error.hpp"

namespace viraltrace {

namespace {

double rel_diameter(const std::vector<std::vector<double>>& verts, std::size_t best) {
  double d = 0.0;
  for (std::size_t j = 0; j < verts.size(); ++j) {
    if (j == best) continue;
    for (std::size_t i = 0; i < verts[j].size(); ++i) {
      double scale = std::max(1.0, std::fabs(verts[best][i]));
      d = std::max(d, std::fabs(verts[j][i] - verts[best][i]) / scale);
    }
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) fail(Errc::invalid_params, "empty parameter vector");

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  std::vector<std::vector<double>> x(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += opts.initial_step;

  NelderMeadResult res;
  std::vector<double> fx(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    fx[j] = f(x[j]);
    ++res.evaluations;
  }
  std::vector<std::size_t> order(n + 1);

  auto sort_order = [&]() {
    for (std::size_t j = 0; j <= n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
  };

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (res.evaluations < opts.max_evaluations) {
    sort_order();
    std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

    res.final_diameter = rel_diameter(x, best);
    if (res.final_diameter < opts.rel_tol) {
      res.converged = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        if (j != worst) s += x[j][i];
      }
      centroid[i] = s / static_cast<double>(n);
    }

    for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + kReflect * (centroid[i] - x[worst][i]);
    double fr = f(xr);
    ++res.evaluations;

    if (fr < fx[best]) {
      for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + kExpand * (xr[i] - centroid[i]);
      double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
    } else if (fr < fx[second_worst]) {
      x[worst] = xr;
      fx[worst] = fr;
    } else {
      bool outside = fr < fx[worst];
      const std::vector<double>& toward = outside ? xr : x[worst];
      for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + kContract * (toward[i] - centroid[i]);
      double fc = f(xc);
      ++res.evaluations;
      if (fc < (outside ? fr : fx[worst])) {
        x[worst] = xc;
        fx[worst] = fc;
      } else {
        for (std::size_t j = 0; j <= n; ++j) {
          if (j == best) continue;
          for (std::size_t i = 0; i < n; ++i) x[j][i] = x[best][i] + kShrink * (x[j][i] - x[best][i]);
          fx[j] = f(x[j]);
          ++res.evaluations;
        }
      }
    }
  }

  sort_order();
  res.x = x[order[0]];
  res.fx = fx[order[0]];
  res.final_diameter = rel_diameter(x, order[0]);
  if (res.final_diameter < opts.rel_tol) res.converged = true;
  return res;
}

}  // namespace viraltrace
