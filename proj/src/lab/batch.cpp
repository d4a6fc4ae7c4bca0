#include "qcorr/lab/batch.hpp"

#include <chrono>
#include <exception>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <omp.h>

#include "qcorr/criteria.hpp"
#include "qcorr/seeding.hpp"

namespace qcorr::lab {

namespace {

// Runs body(i) for i in [0, n); the first exception thrown by any item is
// rethrown after the loop, since none may escape an OpenMP region.
template <typename Body>
void for_each_index(long n, Execution exec, int chunk, Body body) {
  if (exec == Execution::Serial) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, chunk)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(qcorr_batch_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

DatasetGrid build_grid(const RunConfig& config) {
  config.validate();
  const double quarter = std::numbers::pi / 2.0;
  const double w = config.exclusion_half_width;
  const int per_quadrant = config.grid.theta_per_quadrant;
  DatasetGrid grid;
  grid.theta_spacing = (quarter - 2.0 * w) / per_quadrant;
  grid.delta_theta = config.delta_theta.value_or(grid.theta_spacing / 2.0);

  std::vector<double> thetas;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < per_quadrant; ++j) thetas.push_back(k * quarter + w + (j + 0.25) * grid.theta_spacing);
  std::vector<double> ps;
  for (int i = 0; i < config.grid.p_count; ++i)
    ps.push_back(config.grid.p_count == 1
                     ? config.grid.p_min
                     : config.grid.p_min + (config.grid.p_max - config.grid.p_min) * i / (config.grid.p_count - 1));

  const std::size_t available = thetas.size() * ps.size();
  if (config.train_size > available || config.test_size > available)
    throw std::invalid_argument("grid has " + std::to_string(available) + " points, fewer than requested");

  for (double theta : thetas) {
    const double shifted = theta + grid.delta_theta;
    if (distance_to_degenerate(shifted) <= w)
      throw std::invalid_argument("delta_theta moves test points into an exclusion window");
    for (double p : ps) {
      if (grid.train.size() < config.train_size) grid.train.push_back({p, theta});
      if (grid.test.size() < config.test_size) grid.test.push_back({p, shifted});
    }
  }
  for (const auto& a : grid.test)
    for (const auto& b : grid.train)
      if (std::abs(a.p - b.p) < 1e-12 && std::abs(std::remainder(a.theta - b.theta, 2.0 * std::numbers::pi)) < 1e-9)
        throw std::invalid_argument("train and test grids overlap");
  return grid;
}

ml::DataRow simulate_row(const StateParams& params, std::int64_t n0, NoiseModel noise, std::uint64_t seed) {
  const DensityMatrix rho = make_state(params);
  ml::DataRow row;
  row.params = params;
  row.source = noise;
  row.seed = seed;
  const CountRecord tomo = simulate_counts(rho, tomography_projectors(), n0, derive_seed(seed, "tomography"), noise);
  row.label = label_state(tomography_reconstruct(tomo));
  row.features = noise == NoiseModel::None
                     ? features_exact(rho)
                     : features_from_counts(
                           simulate_counts(rho, feature_projectors(), n0, derive_seed(seed, "features"), noise));
  return row;
}

ml::Dataset simulate_rows(const std::vector<StateParams>& points, std::int64_t n0, NoiseModel noise,
                          std::uint64_t root_seed, std::string_view tag, Execution exec) {
  ml::Dataset rows(points.size());
  for_each_index(static_cast<long>(points.size()), exec, 4, [&](long i) {
    rows[i] = simulate_row(points[i], n0, noise, derive_seed(root_seed, tag, static_cast<std::uint64_t>(i)));
  });
  return rows;
}

GeneratedData generate_datasets(const RunConfig& config, NoiseModel noise, Execution exec) {
  GeneratedData out;
  out.grid = build_grid(config);
  out.train = simulate_rows(out.grid.train, config.n0, noise, config.seed, "train", exec);
  out.test = simulate_rows(out.grid.test, config.n0, noise, config.seed, "test", exec);
  return out;
}

std::vector<int> predict_batch(const ml::Classifier& model, const std::vector<std::vector<double>>& xs,
                               Execution exec) {
  std::vector<int> out(xs.size());
  for_each_index(static_cast<long>(xs.size()), exec, 64, [&](long i) { out[i] = ml::predict(model, xs[i]); });
  return out;
}

namespace {

SdpBatchItem timed_classify(const DensityMatrix& rho, std::size_t da, std::size_t db, int budget) {
  const auto start = std::chrono::steady_clock::now();
  SdpBatchItem item{classify_sdp(rho, da, db, budget), 0.0};
  item.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return item;
}

}  // namespace

std::vector<SdpBatchItem> classify_sdp_batch(const std::vector<DensityMatrix>& states, std::size_t da,
                                             std::size_t db, int budget, Execution exec) {
  std::vector<SdpBatchItem> out(states.size());
  for_each_index(static_cast<long>(states.size()), exec, 1,
                 [&](long i) { out[i] = timed_classify(states[i], da, db, budget); });
  return out;
}

std::vector<DensityMatrix> random_states(std::size_t d, int count, std::uint64_t root_seed) {
  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(random_density_matrix(d, d, derive_seed(root_seed, "sdp-state", static_cast<std::uint64_t>(i))));
  return out;
}

void apply_thread_setting(const RunConfig& config) {
  if (config.threads > 0) omp_set_num_threads(config.threads);
}

}  // namespace qcorr::lab
