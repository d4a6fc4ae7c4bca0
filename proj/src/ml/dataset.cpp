#include "qcorr/ml/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace qcorr::ml {

using nlohmann::json;

std::string to_jsonl_line(const DataRow& row) {
  json j = {{"p", row.params.p},
            {"theta", row.params.theta},
            {"f1", row.features.f1},
            {"f2", row.features.f2},
            {"label", std::string(label_name(row.label))},
            {"source", row.source == NoiseModel::Poisson ? "poisson" : "exact"},
            {"seed", row.seed}};
  return j.dump();
}

DataRow parse_jsonl_line(const std::string& line) {
  const json j = json::parse(line);
  DataRow row;
  row.params = {j.at("p").get<double>(), j.at("theta").get<double>()};
  row.features = {j.at("f1").get<double>(), j.at("f2").get<double>()};
  row.label = parse_label(j.at("label").get<std::string>());
  const auto source = j.at("source").get<std::string>();
  if (source == "poisson") {
    row.source = NoiseModel::Poisson;
  } else if (source == "exact") {
    row.source = NoiseModel::None;
  } else {
    throw std::invalid_argument("dataset row: unknown source " + source);
  }
  row.seed = j.at("seed").get<std::uint64_t>();
  return row;
}

void write_jsonl(std::ostream& out, const Dataset& data) {
  for (const auto& row : data) out << to_jsonl_line(row) << '\n';
}

Dataset read_jsonl(std::istream& in) {
  Dataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    data.push_back(parse_jsonl_line(line));
  }
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  write_jsonl(out, data);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read dataset: " + path);
  return read_jsonl(in);
}

std::string_view question_name(Question q) {
  switch (q) {
    case Question::FourClass: return "four-class";
    case Question::Entangled: return "entangled";
    case Question::Steerable: return "steerable";
    case Question::Nonlocal: return "nonlocal";
  }
  return "?";
}

Question parse_question(std::string_view text) {
  for (Question q : {Question::FourClass, Question::Entangled, Question::Steerable,
                     Question::Nonlocal})
    if (question_name(q) == text) return q;
  throw std::invalid_argument("unknown question: " + std::string(text));
}

int num_classes(Question q) { return q == Question::FourClass ? kNumClasses : 2; }

int collapse_label(CorrelationLabel label, Question q) {
  const int k = static_cast<int>(label);
  switch (q) {
    case Question::FourClass: return k;
    case Question::Entangled: return k >= 1 ? 1 : 0;
    case Question::Steerable: return k >= 2 ? 1 : 0;
    case Question::Nonlocal: return k == 3 ? 1 : 0;
  }
  return k;
}

TrainingSet to_training_set(const Dataset& data, Question q) {
  TrainingSet set;
  set.num_classes = num_classes(q);
  set.x.reserve(data.size());
  set.y.reserve(data.size());
  for (const auto& row : data) {
    set.x.push_back({row.features.f1, row.features.f2});
    set.y.push_back(collapse_label(row.label, q));
  }
  return set;
}

void validate(const TrainingSet& set) {
  if (set.y.empty()) throw std::invalid_argument("dataset is empty");
  if (set.x.size() != set.y.size()) throw std::invalid_argument("dataset: x/y length mismatch");
  const std::size_t dim = set.input_dim();
  if (dim == 0) throw std::invalid_argument("dataset: zero-width features");
  for (std::size_t i = 0; i < set.x.size(); ++i) {
    if (set.x[i].size() != dim) throw std::invalid_argument("dataset: ragged feature rows");
    for (double v : set.x[i])
      if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
    if (set.y[i] < 0 || set.y[i] >= set.num_classes)
      throw std::invalid_argument("dataset: label out of range");
  }
}

Standardizer Standardizer::fit(const TrainingSet& set) {
  validate(set);
  const std::size_t dim = set.input_dim();
  const double n = static_cast<double>(set.size());
  Standardizer s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (const auto& row : set.x)
    for (std::size_t k = 0; k < dim; ++k) s.mean[k] += row[k] / n;
  for (const auto& row : set.x)
    for (std::size_t k = 0; k < dim; ++k) s.scale[k] += (row[k] - s.mean[k]) * (row[k] - s.mean[k]) / n;
  for (auto& v : s.scale) v = v > 1e-24 ? std::sqrt(v) : 1.0;
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) throw std::invalid_argument("Standardizer: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - mean[k]) / scale[k];
  return out;
}

}  // namespace qcorr::ml
