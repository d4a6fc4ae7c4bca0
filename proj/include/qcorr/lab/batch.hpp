// Per-state batch kernels. Each has an OpenMP version and a serial reference
// that must produce identical results; item seeds come from derive_seed, so
// output does not depend on the thread count.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "qcorr/lab/config.hpp"
#include "qcorr/ml/classifier.hpp"
#include "qcorr/sdp.hpp"
#include "qcorr/state_family.hpp"

namespace qcorr::lab {

enum class Execution { Serial, Parallel };

/// Train and test (p, theta) points. Train theta sits at (j + 1/4) of each
/// cell of the allowed arc; test theta is shifted by delta_theta.
struct DatasetGrid {
  std::vector<StateParams> train;
  std::vector<StateParams> test;
  double theta_spacing = 0.0;
  double delta_theta = 0.0;
};

/// Throws std::invalid_argument when train and test points coincide, a test
/// theta lands in an exclusion window, or the grid is too small for the sizes.
DatasetGrid build_grid(const RunConfig& config);

/// One simulated row: tomography counts -> reconstruction -> criteria label,
/// and features from the eight feature counts (exact traces when noise is none).
ml::DataRow simulate_row(const StateParams& params, std::int64_t n0, NoiseModel noise, std::uint64_t seed);

/// Row i uses derive_seed(root_seed, tag, i).
ml::Dataset simulate_rows(const std::vector<StateParams>& points, std::int64_t n0, NoiseModel noise,
                          std::uint64_t root_seed, std::string_view tag, Execution exec);

struct GeneratedData {
  DatasetGrid grid;
  ml::Dataset train;
  ml::Dataset test;
};

GeneratedData generate_datasets(const RunConfig& config, NoiseModel noise, Execution exec);

std::vector<int> predict_batch(const ml::Classifier& model, const std::vector<std::vector<double>>& xs,
                               Execution exec);

struct SdpBatchItem {
  SdpClassification result;
  double wall_time_ms = 0.0;
};

std::vector<SdpBatchItem> classify_sdp_batch(const std::vector<DensityMatrix>& states, std::size_t dim_a,
                                             std::size_t dim_b, int budget, Execution exec);

/// State i is random_density_matrix(d, d, derive_seed(root_seed, "sdp-state", i)).
std::vector<DensityMatrix> random_states(std::size_t d, int count, std::uint64_t root_seed);

/// Applies config.threads when positive.
void apply_thread_setting(const RunConfig& config);

}  // namespace qcorr::lab
