#include "qcorr/ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace qcorr::ml {

bool SvmModel::converged() const {
  return std::all_of(machines.begin(), machines.end(), [](const auto& m) { return m.converged; });
}

std::size_t SvmModel::support_vector_count() const {
  std::size_t n = 0;
  for (const auto& m : machines) n += m.support_vectors.size();
  return n;
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double width) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
  return std::exp(-d2 / (2.0 * width * width));
}

SmoResult smo_solve(std::span<const double> K, std::span<const int> y, double C, double tolerance,
                    long max_iterations) {
  const std::size_t n = y.size();
  if (K.size() != n * n) throw std::invalid_argument("smo_solve: kernel size mismatch");
  constexpr double kTau = 1e-12;
  SmoResult res;
  res.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q alpha - e
  auto Q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * K[i * n + j]; };
  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && res.alpha[t] < C) || (y[t] < 0 && res.alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && res.alpha[t] > 0.0) || (y[t] < 0 && res.alpha[t] < C);
  };

  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) { gmax = v; i = t; }
      if (in_low(t) && v < gmin) { gmin = v; j = t; }
    }
    if (i == n || j == n || gmax - gmin < tolerance) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iterations) break;
    ++res.iterations;

    const double ai_old = res.alpha[i], aj_old = res.alpha[j];
    if (y[i] != y[j]) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = res.alpha[i] - res.alpha[j];
      res.alpha[i] += delta;
      res.alpha[j] += delta;
      if (diff > 0.0) {
        if (res.alpha[j] < 0.0) { res.alpha[j] = 0.0; res.alpha[i] = diff; }
      } else {
        if (res.alpha[i] < 0.0) { res.alpha[i] = 0.0; res.alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (res.alpha[i] > C) { res.alpha[i] = C; res.alpha[j] = C - diff; }
      } else {
        if (res.alpha[j] > C) { res.alpha[j] = C; res.alpha[i] = C + diff; }
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = res.alpha[i] + res.alpha[j];
      res.alpha[i] -= delta;
      res.alpha[j] += delta;
      if (sum > C) {
        if (res.alpha[i] > C) { res.alpha[i] = C; res.alpha[j] = sum - C; }
      } else {
        if (res.alpha[j] < 0.0) { res.alpha[j] = 0.0; res.alpha[i] = sum; }
      }
      if (sum > C) {
        if (res.alpha[j] > C) { res.alpha[j] = C; res.alpha[i] = sum - C; }
      } else {
        if (res.alpha[i] < 0.0) { res.alpha[i] = 0.0; res.alpha[j] = sum; }
      }
    }
    const double di = res.alpha[i] - ai_old, dj = res.alpha[j] - aj_old;
    for (std::size_t t = 0; t < n; ++t) grad[t] += Q(t, i) * di + Q(t, j) * dj;
  }

  // Bias: average over free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    const bool at_upper = res.alpha[t] >= C, at_lower = res.alpha[t] <= 0.0;
    if (at_upper) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  return res;
}

SvmModel svm_train(const TrainingSet& train, const SvmConfig& config) {
  validate(train);
  if (!(config.C > 0.0)) throw std::invalid_argument("svm_train: C must be positive");
  if (!(config.kernel_width > 0.0)) throw std::invalid_argument("svm_train: kernel width must be positive");
  SvmModel model;
  model.input_dim = train.input_dim();
  model.num_classes = train.num_classes;
  model.C = config.C;
  model.kernel_width = config.kernel_width;
  model.scaler = Standardizer::fit(train);

  std::vector<std::vector<double>> xs;
  xs.reserve(train.size());
  for (const auto& row : train.x) xs.push_back(model.scaler.apply(row));

  int present = 0;
  for (int c = 0; c < train.num_classes; ++c)
    if (std::find(train.y.begin(), train.y.end(), c) != train.y.end()) ++present;
  if (present < 2) throw std::invalid_argument("svm_train: need at least two classes in the training data");

  for (int a = 0; a < train.num_classes; ++a) {
    for (int b = a + 1; b < train.num_classes; ++b) {
      std::vector<std::size_t> idx;
      std::vector<int> y;
      for (std::size_t t = 0; t < train.size(); ++t) {
        if (train.y[t] == a || train.y[t] == b) {
          idx.push_back(t);
          y.push_back(train.y[t] == a ? 1 : -1);
        }
      }
      SvmBinaryMachine machine;
      machine.positive = a;
      machine.negative = b;
      const bool has_a = std::find(y.begin(), y.end(), 1) != y.end();
      const bool has_b = std::find(y.begin(), y.end(), -1) != y.end();
      if (!has_a || !has_b) {
        // A pair with one absent class always votes for the present one.
        machine.rho = has_a ? -1.0 : 1.0;
        model.machines.push_back(std::move(machine));
        continue;
      }
      const std::size_t n = idx.size();
      std::vector<double> K(n * n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c)
          K[r * n + c] = K[c * n + r] = rbf_kernel(xs[idx[r]], xs[idx[c]], config.kernel_width);
      const SmoResult smo = smo_solve(K, y, config.C, config.tolerance, config.max_iterations);
      machine.rho = smo.rho;
      machine.converged = smo.converged;
      machine.iterations = smo.iterations;
      for (std::size_t t = 0; t < n; ++t) {
        if (smo.alpha[t] <= 0.0) continue;
        machine.support_vectors.push_back(xs[idx[t]]);
        machine.coef.push_back(y[t] * smo.alpha[t]);
      }
      if (!smo.converged)
        std::clog << "warning: svm pair (" << a << ", " << b << ") stopped after "
                  << smo.iterations << " iterations without reaching tolerance\n";
      model.machines.push_back(std::move(machine));
    }
  }
  return model;
}

double svm_decision(const SvmBinaryMachine& machine, std::span<const double> z, double width) {
  double f = -machine.rho;
  for (std::size_t i = 0; i < machine.coef.size(); ++i)
    f += machine.coef[i] * rbf_kernel(machine.support_vectors[i], z, width);
  return f;
}

int svm_predict(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) throw std::invalid_argument("svm_predict: input dimension mismatch");
  const auto z = model.scaler.apply(x);
  std::vector<int> votes(static_cast<std::size_t>(model.num_classes), 0);
  for (const auto& m : model.machines)
    ++votes[static_cast<std::size_t>(svm_decision(m, z, model.kernel_width) > 0.0 ? m.positive : m.negative)];
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace qcorr::ml
