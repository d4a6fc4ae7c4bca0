// Single-hidden-layer network: x1 = ReLU(W1 x0 + w1), x2 = softmax(W2 x1 + w2),
// trained on categorical cross-entropy with RMSprop.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcorr/ml/dataset.hpp"

namespace qcorr::ml {

struct AnnConfig {
  std::size_t hidden_units = 32;
  int epochs = 30;
  std::size_t batch = 32;
  double learning_rate = 1e-2;
  double decay = 0.9;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  /// 0 means "take it from the data"; otherwise must match the data width.
  std::size_t input_dim = 0;
};

struct AnnModel {
  std::size_t input_dim = 0;
  std::size_t hidden_units = 0;
  std::size_t num_classes = kNumClasses;
  std::vector<double> W1;  // hidden_units x input_dim, row-major
  std::vector<double> w1;  // hidden_units
  std::vector<double> W2;  // num_classes x hidden_units, row-major
  std::vector<double> w2;  // num_classes
  Standardizer scaler;
  /// Mean training loss per epoch.
  std::vector<double> loss_history;

  /// Zero weights with the given shape and an identity scaler.
  static AnnModel zeros(std::size_t input_dim, std::size_t hidden_units, std::size_t num_classes);
  void check_shapes() const;
};

/// Output class probabilities for a raw (unstandardized) input.
std::vector<double> ann_forward(const AnnModel& model, std::span<const double> x);
int ann_predict(const AnnModel& model, std::span<const double> x);

/// Flat view of every trainable parameter, in the order W1, w1, W2, w2.
std::vector<double> ann_parameters(const AnnModel& model);
void ann_set_parameters(AnnModel& model, std::span<const double> params);

struct AnnLossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as ann_parameters
};

/// Mean cross-entropy over the listed rows and its exact gradient by backprop.
AnnLossGradient ann_loss_gradient(const AnnModel& model, const TrainingSet& data,
                                  std::span<const std::size_t> rows);
double ann_loss(const AnnModel& model, const TrainingSet& data, std::span<const std::size_t> rows);

/// Throws std::invalid_argument with fewer than two classes present and
/// std::runtime_error if the loss becomes NaN.
AnnModel ann_train(const TrainingSet& train, const AnnConfig& config);

}  // namespace qcorr::ml
