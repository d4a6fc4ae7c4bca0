#include "qcorr/lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "qcorr/criteria.hpp"
#include "qcorr/seeding.hpp"

namespace qcorr::lab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json header(const RunConfig& config, std::string_view command) {
  return {{"format_version", kReportFormatVersion},
          {"command", command},
          {"seed", config.seed},
          {"config_hash", config_hash(config)}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HarnessError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ml::Dataset read_rows(const fs::path& path) {
  if (!fs::exists(path)) throw HarnessError("missing dataset " + path.string() + " (run gen-data first)");
  try {
    ml::Dataset rows = ml::load_dataset(path.string());
    if (rows.empty()) throw HarnessError("dataset " + path.string() + " is empty");
    return rows;
  } catch (const HarnessError&) {
    throw;
  } catch (const std::exception& e) {
    throw HarnessError("dataset " + path.string() + " does not match the row schema: " + e.what());
  }
}

json class_names(int num_classes) {
  json names = json::array();
  if (num_classes == kNumClasses) {
    for (int k = 0; k < kNumClasses; ++k) names.push_back(label_name(static_cast<CorrelationLabel>(k)));
  } else {
    names = {"no", "yes"};
  }
  return names;
}

json eval_json(const ml::EvalReport& rep, int num_classes) {
  json j = ml::report_to_json(rep);
  j["classes"] = class_names(num_classes);
  return j;
}

ml::Classifier load_or_train(const RunConfig& config, const fs::path& dir, ml::ModelKind kind,
                             const ml::Dataset& train) {
  const fs::path path = model_path(dir, kind);
  if (fs::exists(path)) {
    try {
      return ml::load_model(path.string());
    } catch (const std::exception& e) {
      throw HarnessError("model file " + path.string() + ": " + e.what());
    }
  }
  return ml::train_model(kind, ml::to_training_set(train), config.models);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

fs::path phase_path(const fs::path& dir, ml::ModelKind kind) {
  return dir / ("phase_" + std::string(ml::model_name(kind)) + ".csv");
}

fs::path model_path(const fs::path& dir, ml::ModelKind kind) {
  return dir / paths::kModels / (std::string(ml::model_name(kind)) + ".json");
}

void write_phase_csv(const fs::path& path, const ml::Dataset& test, const std::vector<int>& predictions) {
  if (predictions.size() != test.size()) throw std::invalid_argument("write_phase_csv: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HarnessError("cannot write " + path.string());
  out << "p,theta,true,pred,correct\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto pred = static_cast<CorrelationLabel>(predictions[i]);
    out << format_number(test[i].params.p) << ',' << format_number(test[i].params.theta) << ','
        << label_name(test[i].label) << ',' << label_name(pred) << ',' << (pred == test[i].label ? 1 : 0) << '\n';
  }
}

json cmd_gen_data(const RunConfig& config, const fs::path& dir, NoiseModel noise, Execution exec) {
  fs::create_directories(dir);
  GeneratedData data;
  try {
    data = generate_datasets(config, noise, exec);
  } catch (const std::invalid_argument& e) {
    throw HarnessError(e.what());
  }
  ml::save_dataset((dir / paths::kTrain).string(), data.train);
  ml::save_dataset((dir / paths::kTest).string(), data.test);

  json report = header(config, "gen-data");
  report["noise"] = noise_name(noise);
  report["n0"] = config.n0;
  report["theta_spacing"] = data.grid.theta_spacing;
  report["delta_theta"] = data.grid.delta_theta;
  for (const auto& [name, rows] : {std::pair<const char*, const ml::Dataset*>{"train", &data.train},
                                   std::pair<const char*, const ml::Dataset*>{"test", &data.test}}) {
    json counts = json::object();
    for (int k = 0; k < kNumClasses; ++k) counts[std::string(label_name(static_cast<CorrelationLabel>(k)))] = 0;
    for (const auto& row : *rows) counts[std::string(label_name(row.label))] = counts[std::string(label_name(row.label))].get<int>() + 1;
    report[name] = {{"rows", rows->size()}, {"class_counts", counts}};
  }
  return report;
}

json cmd_train_eval(const RunConfig& config, const fs::path& dir, const std::vector<ml::ModelKind>& models) {
  const ml::Dataset train = read_rows(dir / paths::kTrain);
  const ml::Dataset test = read_rows(dir / paths::kTest);
  fs::create_directories(dir / paths::kModels);
  json report = header(config, "train-eval");
  report["train_rows"] = train.size();
  report["test_rows"] = test.size();
  for (ml::ModelKind kind : models) {
    const ml::Classifier model = ml::train_model(kind, ml::to_training_set(train), config.models);
    ml::save_model(model_path(dir, kind).string(), model);
    const ml::EvalReport four = ml::evaluate(model, ml::to_training_set(test));
    write_phase_csv(phase_path(dir, kind), test, four.predictions);
    json entry = {{"four_class", eval_json(four, kNumClasses)}};
    for (ml::Question q : {ml::Question::Entangled, ml::Question::Steerable, ml::Question::Nonlocal})
      entry["binary"][std::string(ml::question_name(q))] =
          eval_json(ml::binary_task(kind, train, test, q, config.models), 2);
    if (const auto* svm = std::get_if<ml::SvmModel>(&model)) {
      entry["converged"] = svm->converged();
      entry["support_vectors"] = svm->support_vector_count();
    }
    if (const auto* ann = std::get_if<ml::AnnModel>(&model)) entry["final_loss"] = ann->loss_history.back();
    report["models"][std::string(ml::model_name(kind))] = entry;
  }
  write_json(dir / paths::kTrainEval, report);
  return report;
}

json cmd_mismatch_study(const RunConfig& config, const fs::path& dir, const std::vector<ml::ModelKind>& models,
                        Execution exec) {
  const ml::Dataset matched_train = read_rows(dir / paths::kTrain);
  const ml::Dataset test = read_rows(dir / paths::kTest);
  for (const auto* rows : {&matched_train, &test})
    for (const auto& row : *rows)
      if (row.source != NoiseModel::Poisson)
        throw HarnessError("mismatch-study needs Poisson datasets (run gen-data --noise poisson)");
  const ml::Dataset noiseless_train =
      simulate_rows(build_grid(config).train, config.n0, NoiseModel::None, config.seed, "train", exec);

  json report = header(config, "mismatch-study");
  report["arms"] = {
      {"matched", {{"train_source", "poisson"}, {"root_seed", config.seed}, {"tag", "train"}, {"rows", matched_train.size()}}},
      {"mismatched", {{"train_source", "exact"}, {"root_seed", config.seed}, {"tag", "train"}, {"rows", noiseless_train.size()}}},
      {"test", {{"source", "poisson"}, {"root_seed", config.seed}, {"tag", "test"}, {"rows", test.size()}}},
  };
  report["model_seeds"] = {{"ann", config.models.ann.seed}, {"svm", config.models.svm.seed}};
  const ml::TrainingSet test_set = ml::to_training_set(test);
  const auto class_iii = static_cast<std::size_t>(CorrelationLabel::OneWaySteerable);
  for (ml::ModelKind kind : models) {
    const ml::EvalReport matched =
        ml::evaluate(ml::train_model(kind, ml::to_training_set(matched_train), config.models), test_set);
    const ml::EvalReport mismatched =
        ml::evaluate(ml::train_model(kind, ml::to_training_set(noiseless_train), config.models), test_set);
    auto recall_json = [](const std::optional<double>& r) { return r ? json(*r) : json(nullptr); };
    report["models"][std::string(ml::model_name(kind))] = {
        {"matched", eval_json(matched, kNumClasses)},
        {"mismatched", eval_json(mismatched, kNumClasses)},
        {"accuracy_delta", mismatched.accuracy - matched.accuracy},
        {"mismatch_lower", mismatched.accuracy < matched.accuracy},
        {"class_iii_recall", {{"matched", recall_json(matched.recall[class_iii])},
                              {"mismatched", recall_json(mismatched.recall[class_iii])}}},
    };
  }
  write_json(dir / paths::kMismatch, report);
  return report;
}

namespace {

using Clock = std::chrono::steady_clock;

double timer_resolution() {
  double best = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = Clock::now();
    auto b = Clock::now();
    while (b == a) b = Clock::now();
    best = std::min(best, std::chrono::duration<double>(b - a).count());
  }
  return best;
}

struct Timing {
  double median_block = 0.0;  // seconds per repetition
  double per_state = 0.0;
};

template <typename Block>
Timing time_blocks(int repetitions, std::size_t items, Block block) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(repetitions));
  block();  // warm-up
  for (int r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    block();
    samples.push_back(std::chrono::duration<double>(Clock::now() - start).count());
  }
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2), samples.end());
  const double median = samples[samples.size() / 2];
  return {median, median / static_cast<double>(items)};
}

}  // namespace

json cmd_bench(const RunConfig& config, const fs::path& dir) {
  const ml::Dataset train = read_rows(dir / paths::kTrain);
  const ml::Dataset test = read_rows(dir / paths::kTest);
  const ml::TrainingSet test_set = ml::to_training_set(test);

  // Seeded random sample of test states for labeling, counts drawn up front.
  std::vector<std::size_t> order(test.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(derive_seed(config.seed, "bench-sample")));
  const std::size_t label_items = std::min<std::size_t>(16, test.size());
  std::vector<CountRecord> counts;
  for (std::size_t i = 0; i < label_items; ++i) {
    const std::size_t idx = order[i];
    counts.push_back(simulate_counts(make_state(test[idx].params), tomography_projectors(), config.n0,
                                     derive_seed(config.seed, "bench-counts", idx), NoiseModel::Poisson));
  }
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.bench.batch), test_set.size());

  volatile int sink = 0;
  const Timing labeling = time_blocks(config.bench.repetitions, label_items, [&] {
    for (const auto& c : counts) sink = sink + static_cast<int>(label_state(tomography_reconstruct(c)));
  });
  std::vector<std::pair<ml::ModelKind, Timing>> inference;
  for (ml::ModelKind kind : ml::kAllModels) {
    const ml::Classifier model = load_or_train(config, dir, kind, train);
    inference.emplace_back(kind, time_blocks(config.bench.repetitions, batch, [&] {
                             for (std::size_t i = 0; i < batch; ++i) sink = sink + ml::predict(model, test_set.x[i]);
                           }));
  }

  const double resolution = timer_resolution();
  json report = header(config, "bench");
  report["repetitions"] = config.bench.repetitions;
  report["labeling_states"] = label_items;
  report["inference_batch"] = batch;
  report["timer_resolution_s"] = resolution;
  auto entry = [&](const Timing& t) {
    return json{{"per_state_s", t.per_state},
                {"median_block_s", t.median_block},
                {"resolution_flag", resolution > 0.1 * t.median_block}};
  };
  report["timings"]["labeling"] = entry(labeling);
  for (const auto& [kind, t] : inference) report["timings"][std::string(ml::model_name(kind))] = entry(t);

  const double a = labeling.per_state, b = inference[0].second.per_state, c = inference[1].second.per_state,
               d = inference[2].second.per_state;
  const bool holds = a > b && b > c && b > d;
  report["ordering"] = {{"labeling_gt_ann", a > b}, {"ann_gt_svm", b > c}, {"ann_gt_dt", b > d}, {"holds", holds}};
  fs::create_directories(dir);
  write_json(dir / paths::kBench, report);
  if (!holds) throw OrderingViolation("timing ordering labeling > ann > svm, dt does not hold", report);
  return report;
}

json cmd_sdp_run(const RunConfig& config, const fs::path& dir, Execution exec) {
  const auto& s = config.sdp;
  if (s.dim_a < 2 || s.dim_b < 2 || s.dim_a * s.dim_a * s.dim_b > kMaxExtensionWeight)
    throw HarnessError("sdp-run: need d_a, d_b >= 2 and d_a^2 d_b <= 100");
  fs::create_directories(dir);
  const std::size_t d = s.dim_a * s.dim_b;
  const auto states = random_states(d, s.states, derive_seed(config.seed, "sdp"));
  const bool ppt_exact = d <= 6;

  auto agrees = [](const SdpBatchItem& item) {
    const bool ppt_separable = item.result.ppt_min_eig >= -kPptTolerance;
    return (ppt_separable && item.result.verdict == SdpVerdict::SeparableConsistent) ||
           (!ppt_separable && item.result.verdict == SdpVerdict::Entangled);
  };

  const auto items = classify_sdp_batch(states, s.dim_a, s.dim_b, s.budget, exec);
  {
    std::ofstream out(dir / paths::kSdpResults, std::ios::binary);
    if (!out) throw HarnessError("cannot write sdp results");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& r = items[i].result;
      out << json{{"state_id", i},
                  {"ppt_min_eig", r.ppt_min_eig},
                  {"status", verdict_name(r.verdict)},
                  {"residual", r.feasibility.residual},
                  {"iterations", r.feasibility.iterations},
                  {"wall_time_ms", items[i].wall_time_ms}}
                 .dump()
          << '\n';
    }
  }

  json crosstab = {{"ppt_separable", {{"separable-consistent", 0}, {"entangled", 0}, {"undecided", 0}}},
                   {"ppt_entangled", {{"separable-consistent", 0}, {"entangled", 0}, {"undecided", 0}}}};
  int agree = 0;
  for (const auto& item : items) {
    auto& cell = crosstab[item.result.ppt_min_eig >= -kPptTolerance ? "ppt_separable" : "ppt_entangled"]
                         [std::string(verdict_name(item.result.verdict))];
    cell = cell.get<int>() + 1;
    agree += agrees(item);
  }

  json sweep = json::array();
  for (int budget : s.budget_sweep) {
    const auto swept = budget == s.budget ? items : classify_sdp_batch(states, s.dim_a, s.dim_b, budget, exec);
    int ok = 0, undecided = 0;
    for (const auto& item : swept) {
      ok += agrees(item);
      undecided += item.result.verdict == SdpVerdict::Undecided;
    }
    sweep.push_back({{"budget", budget},
                     {"error", 1.0 - static_cast<double>(ok) / static_cast<double>(swept.size())},
                     {"undecided", undecided}});
  }

  json report = header(config, "sdp-run");
  report["dims"] = {s.dim_a, s.dim_b};
  report["states"] = s.states;
  report["budget"] = s.budget;
  report["ppt_exact"] = ppt_exact;
  report["agreement"] = static_cast<double>(agree) / static_cast<double>(items.size());
  report["crosstab"] = crosstab;
  report["budget_sweep"] = sweep;
  write_json(dir / paths::kSdpReport, report);
  return report;
}

json cmd_phase_export(const RunConfig& config, const fs::path& dir, const std::vector<ml::ModelKind>& models) {
  const ml::Dataset train = read_rows(dir / paths::kTrain);
  const ml::Dataset test = read_rows(dir / paths::kTest);
  const ml::TrainingSet test_set = ml::to_training_set(test);
  json report = header(config, "phase-export");
  for (ml::ModelKind kind : models) {
    const ml::Classifier model = load_or_train(config, dir, kind, train);
    const auto predictions = predict_batch(model, test_set.x, Execution::Serial);
    write_phase_csv(phase_path(dir, kind), test, predictions);
    long correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == test_set.y[i];
    report["exports"][std::string(ml::model_name(kind))] = {{"path", phase_path(dir, kind).filename().string()},
                                                            {"rows", predictions.size()},
                                                            {"misclassified", static_cast<long>(predictions.size()) - correct}};
  }
  return report;
}

}  // namespace qcorr::lab
