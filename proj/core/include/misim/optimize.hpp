#pragma once

#include <functional>
#include <vector>

namespace misim {

struct NelderMeadOptions {
  double initial_step = 0.3;
  double x_tol = 1e-9;
  double f_tol = 1e-12;
  int max_evaluations = 2000;
  /// Simplex restarts around the incumbent once converged, until no gain.
  int max_restarts = 4;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization (Nelder-Mead with standard coefficients).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts = {});

}  // namespace misim
