// CART classification tree grown greedily on weighted Gini impurity.

#pragma once

#include <span>
#include <vector>

#include "qcorr/ml/dataset.hpp"

namespace qcorr::ml {

struct DtConfig {
  int max_depth = 4;
};

struct DtNode {
  /// -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  /// Child indices into DtModel::nodes; x[feature] <= threshold goes left.
  int left = -1;
  int right = -1;
  int depth = 0;
  std::vector<int> class_counts;
  int prediction = 0;

  bool is_leaf() const { return feature < 0; }
};

struct DtModel {
  std::size_t input_dim = 0;
  int num_classes = kNumClasses;
  int max_depth = 4;
  std::vector<DtNode> nodes;  // nodes[0] is the root

  int depth() const;
  std::size_t leaf_count() const;
};

double gini_impurity(std::span<const int> class_counts);

/// Throws std::invalid_argument for max_depth < 1.
DtModel dt_train(const TrainingSet& train, const DtConfig& config);
int dt_predict(const DtModel& model, std::span<const double> x);

}  // namespace qcorr::ml
