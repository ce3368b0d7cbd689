#include "misim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace misim {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

// One Nelder-Mead run from an axis-aligned simplex; returns the best vertex.
Vertex run(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x0, double step,
           const NelderMeadOptions& o, int& evals, bool& converged) {
  const std::size_t n = x0.size();
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::vector<Vertex> s;
  s.push_back({x0, eval(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    auto x = x0;
    x[i] += step;
    s.push_back({x, eval(x)});
  }
  auto order = [&] { std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; }); };
  converged = false;
  while (evals < o.max_evaluations) {
    order();
    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(s[i].x[k] - s[0].x[k]));
    if (size < o.x_tol || std::abs(s[n].f - s[0].f) <= o.f_tol * (1.0 + std::abs(s[0].f))) {
      converged = true;
      break;
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) c[k] += s[i].x[k] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (s[n].x[k] - c[k]);
      return x;
    };
    auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < s[0].f) {
      auto xe = along(-2.0);
      const double fe = eval(xe);
      s[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < s[n - 1].f) {
      s[n] = {xr, fr};
    } else {
      const bool outside = fr < s[n].f;
      auto xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < (outside ? fr : s[n].f)) {
        s[n] = {xc, fc};
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t k = 0; k < n; ++k) s[i].x[k] = s[0].x[k] + 0.5 * (s[i].x[k] - s[0].x[k]);
          s[i].f = eval(s[i].x);
        }
      }
    }
  }
  order();
  return s[0];
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts) {
  NelderMeadResult res;
  if (x0.empty()) {
    res.value = f(x0);
    res.evaluations = 1;
    res.converged = true;
    res.x = std::move(x0);
    return res;
  }
  bool conv = false;
  Vertex best = run(f, x0, opts.initial_step, opts, res.evaluations, conv);
  double step = opts.initial_step;
  for (int r = 0; r < opts.max_restarts && res.evaluations < opts.max_evaluations; ++r) {
    step = std::max(0.1 * step, 10.0 * opts.x_tol);
    bool c2 = false;
    Vertex again = run(f, best.x, step, opts, res.evaluations, c2);
    const bool gain = again.f < best.f - opts.f_tol * (1.0 + std::abs(best.f));
    if (again.f < best.f) best = again;
    conv = c2;
    if (!gain) break;
  }
  res.x = best.x;
  res.value = best.f;
  res.converged = conv;
  return res;
}

}  // namespace misim
