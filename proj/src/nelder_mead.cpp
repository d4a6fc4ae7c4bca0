#include "qcorr/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcorr {

namespace {

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

Simplex make_simplex(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& start, double step, std::size_t& evals) {
  Simplex s;
  s.points.push_back(start);
  for (std::size_t i = 0; i < start.size(); ++i) {
    auto p = start;
    p[i] += step;
    s.points.push_back(std::move(p));
  }
  for (const auto& p : s.points) {
    s.values.push_back(f(p));
    ++evals;
  }
  return s;
}

bool run(const std::function<double(const std::vector<double>&)>& f, Simplex& s,
         const NelderMeadOptions& opt, std::size_t& evals) {
  const std::size_t n = s.points.size() - 1;
  std::vector<std::size_t> order(n + 1);
  while (evals < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (const auto& p : s.points)
      for (std::size_t k = 0; k < n; ++k)
        diameter = std::max(diameter, std::abs(p[k] - s.points[best][k]));
    if (s.values[worst] - s.values[best] <= opt.f_tolerance && diameter <= opt.x_tolerance)
      return true;
    if (diameter <= 1e-14) return true;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += s.points[i][k] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (s.points[worst][k] - centroid[k]);
      return p;
    };

    auto reflected = along(-1.0);
    const double fr = f(reflected);
    ++evals;
    if (fr < s.values[best]) {
      auto expanded = along(-2.0);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        s.points[worst] = std::move(expanded);
        s.values[worst] = fe;
      } else {
        s.points[worst] = std::move(reflected);
        s.values[worst] = fr;
      }
      continue;
    }
    if (fr < s.values[second]) {
      s.points[worst] = std::move(reflected);
      s.values[worst] = fr;
      continue;
    }
    const bool outside = fr < s.values[worst];
    auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = f(contracted);
    ++evals;
    if (fc < std::min(fr, s.values[worst])) {
      s.points[worst] = std::move(contracted);
      s.values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        s.points[i][k] = s.points[best][k] + 0.5 * (s.points[i][k] - s.points[best][k]);
      s.values[i] = f(s.points[i]);
      ++evals;
    }
  }
  return false;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options) {
  if (start.empty()) throw std::invalid_argument("nelder_mead: empty start point");
  std::size_t evals = 0;
  Simplex s = make_simplex(f, start, options.initial_step, evals);
  bool converged = run(f, s, options, evals);

  auto best_index = [&] {
    return static_cast<std::size_t>(
        std::min_element(s.values.begin(), s.values.end()) - s.values.begin());
  };
  if (converged) {
    // One restart from the incumbent with a fresh, smaller simplex.
    const auto incumbent = s.points[best_index()];
    s = make_simplex(f, incumbent, options.initial_step * 0.1, evals);
    converged = run(f, s, options, evals);
  }
  const std::size_t b = best_index();
  const double worst = *std::max_element(s.values.begin(), s.values.end());
  return {s.points[b], s.values[b], worst - s.values[b], evals, converged};
}

}  // namespace qcorr
