// Labeled feature datasets and their JSON Lines form.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcorr/measurement.hpp"
#include "qcorr/state_family.hpp"

namespace qcorr::ml {

/// One simulated state: where it sits in the family, the two measured
/// features, and the label assigned by the criteria.
struct DataRow {
  StateParams params;
  FeatureVector features;
  CorrelationLabel label = CorrelationLabel::Separable;
  NoiseModel source = NoiseModel::None;
  std::uint64_t seed = 0;
};

using Dataset = std::vector<DataRow>;

/// {p, theta, f1, f2, label, source, seed}; label uses label_name().
std::string to_jsonl_line(const DataRow& row);
DataRow parse_jsonl_line(const std::string& line);
void write_jsonl(std::ostream& out, const Dataset& data);
Dataset read_jsonl(std::istream& in);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

/// Which classification problem a dataset is collapsed to.
enum class Question { FourClass, Entangled, Steerable, Nonlocal };
std::string_view question_name(Question q);
Question parse_question(std::string_view text);
int num_classes(Question q);
/// Entangled? = class >= II, steerable? = class >= III, nonlocal? = class IV.
int collapse_label(CorrelationLabel label, Question q);

/// Row-major design matrix and integer targets, the form every trainer consumes.
struct TrainingSet {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  int num_classes = kNumClasses;

  std::size_t size() const { return y.size(); }
  std::size_t input_dim() const { return x.empty() ? 0 : x.front().size(); }
};

TrainingSet to_training_set(const Dataset& data, Question q = Question::FourClass);
/// Throws std::invalid_argument on empty data, ragged rows or non-finite features.
void validate(const TrainingSet& set);

/// Per-feature affine map to zero mean and unit variance on the training data.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const TrainingSet& set);
  static Standardizer identity(std::size_t dim);
  std::vector<double> apply(std::span<const double> x) const;
};

}  // namespace qcorr::ml
