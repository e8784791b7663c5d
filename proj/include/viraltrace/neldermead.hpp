#pragma once

#include <functional>
#include <vector>

namespace viraltrace {

struct NelderMeadOptions {
  double initial_step = 0.5;  // offset of the n extra simplex vertices
  double rel_tol = 1e-10;     // relative simplex diameter stop
  long long max_evaluations = 40000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  long long evaluations = 0;
  double final_diameter = 0.0;  // relative, at termination
  bool converged = false;       // diameter fell below rel_tol
};

// Standard downhill simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Fully deterministic; ties resolved by vertex index.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace viraltrace
