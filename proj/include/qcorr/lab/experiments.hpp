// The harness commands. Each reads its inputs from / writes its outputs to a
// run directory and returns the JSON report it wrote.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/lab/batch.hpp"
#include "qcorr/lab/config.hpp"
#include "qcorr/ml/classifier.hpp"

namespace qcorr::lab {

/// Raised when a command's inputs are missing or inconsistent.
class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by bench when the measured ordering does not hold; carries the report.
class OrderingViolation : public std::runtime_error {
 public:
  OrderingViolation(const std::string& what, nlohmann::json report)
      : std::runtime_error(what), report(std::move(report)) {}
  nlohmann::json report;
};

inline constexpr std::string_view kReportFormatVersion = "qcorr-report/1";

namespace paths {
inline constexpr const char* kTrain = "train.jsonl";
inline constexpr const char* kTest = "test.jsonl";
inline constexpr const char* kModels = "models";
inline constexpr const char* kTrainEval = "train_eval.json";
inline constexpr const char* kMismatch = "mismatch.json";
inline constexpr const char* kBench = "bench.json";
inline constexpr const char* kSdpResults = "sdp_results.jsonl";
inline constexpr const char* kSdpReport = "sdp.json";
}  // namespace paths

std::filesystem::path phase_path(const std::filesystem::path& dir, ml::ModelKind kind);
std::filesystem::path model_path(const std::filesystem::path& dir, ml::ModelKind kind);

/// Writes train.jsonl and test.jsonl.
nlohmann::json cmd_gen_data(const RunConfig& config, const std::filesystem::path& dir, NoiseModel noise,
                            Execution exec = Execution::Parallel);

/// Trains each model on train.jsonl, evaluates on test.jsonl (four-class and
/// the three binary questions), saves models and phase-diagram CSVs.
nlohmann::json cmd_train_eval(const RunConfig& config, const std::filesystem::path& dir,
                              const std::vector<ml::ModelKind>& models);

/// Noise-matched arm (train.jsonl) versus a noiseless arm generated on the
/// same grid, both scored on the Poisson test.jsonl.
nlohmann::json cmd_mismatch_study(const RunConfig& config, const std::filesystem::path& dir,
                                  const std::vector<ml::ModelKind>& models, Execution exec = Execution::Parallel);

/// Median per-state wall time of labeling and of each model's inference.
/// Throws OrderingViolation (after writing bench.json) when
/// labeling > ANN > max(SVM, DT) fails.
nlohmann::json cmd_bench(const RunConfig& config, const std::filesystem::path& dir);

nlohmann::json cmd_sdp_run(const RunConfig& config, const std::filesystem::path& dir,
                           Execution exec = Execution::Parallel);

/// Writes phase_<model>.csv from saved models (trained on the spot if absent).
nlohmann::json cmd_phase_export(const RunConfig& config, const std::filesystem::path& dir,
                                const std::vector<ml::ModelKind>& models);

/// CSV with header p,theta,true,pred,correct; one row per test state.
void write_phase_csv(const std::filesystem::path& path, const ml::Dataset& test, const std::vector<int>& predictions);

}  // namespace qcorr::lab
