// Uniform front end over the three model types: training dispatch,
// prediction, evaluation reports, and JSON model files.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qcorr/ml/ann.hpp"
#include "qcorr/ml/dataset.hpp"
#include "qcorr/ml/decision_tree.hpp"
#include "qcorr/ml/svm.hpp"

namespace qcorr::ml {

enum class ModelKind { Ann, Svm, Dt };
std::string_view model_name(ModelKind kind);
ModelKind parse_model(std::string_view text);
inline constexpr ModelKind kAllModels[] = {ModelKind::Ann, ModelKind::Svm, ModelKind::Dt};

struct ModelConfig {
  AnnConfig ann;
  SvmConfig svm;
  DtConfig dt;
};

using Classifier = std::variant<AnnModel, SvmModel, DtModel>;

ModelKind kind_of(const Classifier& model);
std::size_t input_dim(const Classifier& model);
int output_classes(const Classifier& model);
Classifier train_model(ModelKind kind, const TrainingSet& train, const ModelConfig& config);
int predict(const Classifier& model, std::span<const double> x);

struct EvalReport {
  double accuracy = 0.0;
  /// confusion[true][predicted]
  std::vector<std::vector<long>> confusion;
  /// Empty when the class has no test items.
  std::vector<std::optional<double>> recall;
  std::vector<int> predictions;
  std::vector<bool> misclassified;

  std::size_t total() const { return predictions.size(); }
};

/// Throws std::invalid_argument for an empty test set or a dimension mismatch.
EvalReport evaluate(const Classifier& model, const TrainingSet& test);

/// Trains `kind` on the collapsed question and evaluates it on `test`.
EvalReport binary_task(ModelKind kind, const Dataset& train, const Dataset& test, Question question,
                       const ModelConfig& config);

inline constexpr std::string_view kModelFormatVersion = "qcorr-model/1";

nlohmann::json model_to_json(const Classifier& model);
/// Throws std::invalid_argument on a missing or different format_version or bad shapes.
Classifier model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const Classifier& model);
Classifier load_model(const std::string& path);

nlohmann::json report_to_json(const EvalReport& report);

}  // namespace qcorr::ml
