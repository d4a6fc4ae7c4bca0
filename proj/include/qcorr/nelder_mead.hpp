#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qcorr {

struct NelderMeadOptions {
  double initial_step = 0.05;
  /// Stop when the spread of objective values across the simplex drops below this.
  double f_tolerance = 1e-6;
  /// ...and the simplex diameter below this.
  double x_tolerance = 1e-5;
  std::size_t max_evaluations = 4000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  /// max - min objective over the final simplex.
  double spread = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimizer with the standard coefficients (1, 2, 1/2, 1/2).
/// Restarts once from the best vertex when it first converges, which helps on
/// piecewise-smooth objectives.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace qcorr
