// Kernel support vector machine: RBF kernel, one-vs-one over class pairs,
// each pair solved by sequential minimal optimization.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcorr/ml/dataset.hpp"

namespace qcorr::ml {

struct SvmConfig {
  double C = 25.0;
  /// w in K(x, y) = exp(-|x - y|^2 / (2 w^2)), on standardized features.
  double kernel_width = 1.0;
  double tolerance = 1e-3;
  long max_iterations = 200000;
  /// Unused by the deterministic solver; kept so configs round-trip.
  std::uint64_t seed = 1;
};

/// Decision function for classes (positive, negative):
/// f(x) = sum_i coef_i K(sv_i, x) - rho, f > 0 votes for `positive`.
struct SvmBinaryMachine {
  int positive = 0;
  int negative = 1;
  std::vector<std::vector<double>> support_vectors;  // standardized
  std::vector<double> coef;                          // y_i alpha_i
  double rho = 0.0;
  bool converged = true;
  long iterations = 0;
};

struct SvmModel {
  std::size_t input_dim = 0;
  int num_classes = kNumClasses;
  double C = 25.0;
  double kernel_width = 1.0;
  Standardizer scaler;
  std::vector<SvmBinaryMachine> machines;

  bool converged() const;
  std::size_t support_vector_count() const;
};

double rbf_kernel(std::span<const double> x, std::span<const double> y, double width);

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Solves min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0 with Q_ij = y_i y_j K_ij,
/// choosing the maximal violating pair each step. `kernel` is n x n row-major.
SmoResult smo_solve(std::span<const double> kernel, std::span<const int> y, double C,
                    double tolerance, long max_iterations);

/// Throws std::invalid_argument for C <= 0 or fewer than two classes.
/// Machines that hit max_iterations are kept (best so far) and reported
/// through `converged`; a warning is written to std::clog.
SvmModel svm_train(const TrainingSet& train, const SvmConfig& config);
double svm_decision(const SvmBinaryMachine& machine, std::span<const double> standardized,
                    double kernel_width);
/// Pairwise vote; ties go to the lower class index.
int svm_predict(const SvmModel& model, std::span<const double> x);

}  // namespace qcorr::ml
