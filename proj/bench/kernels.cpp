// Serial reference kernels against their OpenMP versions: wall time and a
// check that both produce the same output.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "qcorr/lab/batch.hpp"

namespace {

using namespace qcorr;
using namespace qcorr::lab;

double median_seconds(int reps, const std::function<void()>& fn) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s %12.4f %12.4f %8.2fx   %s\n", name, serial * 1e3, parallel * 1e3, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  RunConfig config;
  const DatasetGrid grid = build_grid(config);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-22s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

  {
    const std::vector<StateParams> points(grid.train.begin(), grid.train.begin() + 120);
    ml::Dataset a, b;
    const double ts = median_seconds(3, [&] { a = simulate_rows(points, config.n0, NoiseModel::Poisson, 1, "b", Execution::Serial); });
    const double tp = median_seconds(3, [&] { b = simulate_rows(points, config.n0, NoiseModel::Poisson, 1, "b", Execution::Parallel); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = ml::to_jsonl_line(a[i]) == ml::to_jsonl_line(b[i]);
    row("simulate+label rows", ts, tp, same);

    const ml::Classifier svm = ml::train_model(ml::ModelKind::Svm, ml::to_training_set(a), {});
    std::vector<std::vector<double>> xs;
    for (int r = 0; r < 50; ++r)
      for (const auto& d : a) xs.push_back({d.features.f1 + 1e-3 * r, d.features.f2});
    std::vector<int> pa, pb;
    const double ps = median_seconds(5, [&] { pa = predict_batch(svm, xs, Execution::Serial); });
    const double pp = median_seconds(5, [&] { pb = predict_batch(svm, xs, Execution::Parallel); });
    row("svm predict batch", ps, pp, pa == pb);
  }
  {
    const auto states = random_states(4, 200, 99);
    std::vector<SdpBatchItem> a, b;
    const double ts = median_seconds(3, [&] { a = classify_sdp_batch(states, 2, 2, 500, Execution::Serial); });
    const double tp = median_seconds(3, [&] { b = classify_sdp_batch(states, 2, 2, 500, Execution::Parallel); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = a[i].result.verdict == b[i].result.verdict &&
             a[i].result.feasibility.iterations == b[i].result.feasibility.iterations &&
             a[i].result.feasibility.residual == b[i].result.feasibility.residual;
    row("sdp classify 2x2", ts, tp, same);
  }
  return 0;
}
