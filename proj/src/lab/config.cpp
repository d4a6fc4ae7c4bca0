#include "qcorr/lab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "qcorr/seeding.hpp"

namespace qcorr::lab {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw std::invalid_argument("config: unknown key " + where + item.key());
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  if (!(grid.p_min >= 0.0 && grid.p_max <= 1.0 && grid.p_min <= grid.p_max))
    throw std::invalid_argument("config: need 0 <= p_min <= p_max <= 1");
  if (grid.p_count < 1 || grid.theta_per_quadrant < 1)
    throw std::invalid_argument("config: grid counts must be positive");
  if (!(exclusion_half_width >= 0.0 && exclusion_half_width < std::acos(-1.0) / 4.0))
    throw std::invalid_argument("config: exclusion_half_width must lie in [0, pi/4)");
  if (train_size < 1 || test_size < 1) throw std::invalid_argument("config: dataset sizes must be at least 1");
  if (delta_theta && !std::isfinite(*delta_theta)) throw std::invalid_argument("config: delta_theta must be finite");
  if (n0 <= 0) throw std::invalid_argument("config: n0 must be positive");
  if (bench.repetitions < 1 || bench.batch < 1) throw std::invalid_argument("config: bench counts must be positive");
  if (sdp.states < 1 || sdp.budget < 1) throw std::invalid_argument("config: sdp counts must be positive");
  for (int b : sdp.budget_sweep)
    if (b < 1) throw std::invalid_argument("config: sdp budgets must be positive");
  if (threads < 0) throw std::invalid_argument("config: threads must be non-negative");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, {"seed", "grid", "exclusion_half_width", "train_size", "test_size", "delta_theta", "n0",
                     "noise", "models", "bench", "sdp", "threads"},
                 "");
  read(j, "seed", c.seed);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"p_min", "p_max", "p_count", "theta_per_quadrant"}, "grid.");
    read(g, "p_min", c.grid.p_min);
    read(g, "p_max", c.grid.p_max);
    read(g, "p_count", c.grid.p_count);
    read(g, "theta_per_quadrant", c.grid.theta_per_quadrant);
  }
  read(j, "exclusion_half_width", c.exclusion_half_width);
  read(j, "train_size", c.train_size);
  read(j, "test_size", c.test_size);
  if (j.contains("delta_theta") && !j.at("delta_theta").is_null()) c.delta_theta = j.at("delta_theta").get<double>();
  read(j, "n0", c.n0);
  if (j.contains("noise")) c.noise = parse_noise(j.at("noise").get<std::string>());
  if (j.contains("models")) {
    const auto& m = j.at("models");
    reject_unknown(m, {"ann", "svm", "dt"}, "models.");
    if (m.contains("ann")) {
      const auto& a = m.at("ann");
      reject_unknown(a, {"hidden_units", "epochs", "batch", "learning_rate", "decay", "epsilon", "seed", "input_dim"},
                     "models.ann.");
      auto& ann = c.models.ann;
      read(a, "hidden_units", ann.hidden_units);
      read(a, "epochs", ann.epochs);
      read(a, "batch", ann.batch);
      read(a, "learning_rate", ann.learning_rate);
      read(a, "decay", ann.decay);
      read(a, "epsilon", ann.epsilon);
      read(a, "seed", ann.seed);
      read(a, "input_dim", ann.input_dim);
    }
    if (m.contains("svm")) {
      const auto& s = m.at("svm");
      reject_unknown(s, {"C", "kernel_width", "tolerance", "max_iterations", "seed"}, "models.svm.");
      auto& svm = c.models.svm;
      read(s, "C", svm.C);
      read(s, "kernel_width", svm.kernel_width);
      read(s, "tolerance", svm.tolerance);
      read(s, "max_iterations", svm.max_iterations);
      read(s, "seed", svm.seed);
    }
    if (m.contains("dt")) {
      const auto& d = m.at("dt");
      reject_unknown(d, {"max_depth"}, "models.dt.");
      read(d, "max_depth", c.models.dt.max_depth);
    }
  }
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    reject_unknown(b, {"repetitions", "batch"}, "bench.");
    read(b, "repetitions", c.bench.repetitions);
    read(b, "batch", c.bench.batch);
  }
  if (j.contains("sdp")) {
    const auto& s = j.at("sdp");
    reject_unknown(s, {"dim_a", "dim_b", "states", "budget", "budget_sweep"}, "sdp.");
    read(s, "dim_a", c.sdp.dim_a);
    read(s, "dim_b", c.sdp.dim_b);
    read(s, "states", c.sdp.states);
    read(s, "budget", c.sdp.budget);
    read(s, "budget_sweep", c.sdp.budget_sweep);
  }
  read(j, "threads", c.threads);
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  const auto& ann = c.models.ann;
  const auto& svm = c.models.svm;
  return {
      {"seed", c.seed},
      {"grid",
       {{"p_min", c.grid.p_min},
        {"p_max", c.grid.p_max},
        {"p_count", c.grid.p_count},
        {"theta_per_quadrant", c.grid.theta_per_quadrant}}},
      {"exclusion_half_width", c.exclusion_half_width},
      {"train_size", c.train_size},
      {"test_size", c.test_size},
      {"delta_theta", c.delta_theta ? json(*c.delta_theta) : json(nullptr)},
      {"n0", c.n0},
      {"noise", noise_name(c.noise)},
      {"models",
       {{"ann",
         {{"hidden_units", ann.hidden_units},
          {"epochs", ann.epochs},
          {"batch", ann.batch},
          {"learning_rate", ann.learning_rate},
          {"decay", ann.decay},
          {"epsilon", ann.epsilon},
          {"seed", ann.seed},
          {"input_dim", ann.input_dim}}},
        {"svm",
         {{"C", svm.C},
          {"kernel_width", svm.kernel_width},
          {"tolerance", svm.tolerance},
          {"max_iterations", svm.max_iterations},
          {"seed", svm.seed}}},
        {"dt", {{"max_depth", c.models.dt.max_depth}}}}},
      {"bench", {{"repetitions", c.bench.repetitions}, {"batch", c.bench.batch}}},
      {"sdp",
       {{"dim_a", c.sdp.dim_a},
        {"dim_b", c.sdp.dim_b},
        {"states", c.sdp.states},
        {"budget", c.sdp.budget},
        {"budget_sweep", c.sdp.budget_sweep}}},
      {"threads", c.threads},
  };
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  return config_from_json(json::parse(in));
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(config_to_json(config).dump())));
  return buf;
}

}  // namespace qcorr::lab
