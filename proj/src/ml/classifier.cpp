#include "qcorr/ml/classifier.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qcorr::ml {

using nlohmann::json;

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ann: return "ann";
    case ModelKind::Svm: return "svm";
    case ModelKind::Dt: return "dt";
  }
  return "?";
}

ModelKind parse_model(std::string_view text) {
  for (ModelKind k : kAllModels)
    if (model_name(k) == text) return k;
  throw std::invalid_argument("unknown model: " + std::string(text));
}

ModelKind kind_of(const Classifier& model) { return static_cast<ModelKind>(model.index()); }

std::size_t input_dim(const Classifier& model) {
  return std::visit([](const auto& m) { return static_cast<std::size_t>(m.input_dim); }, model);
}

int output_classes(const Classifier& model) {
  return std::visit([](const auto& m) { return static_cast<int>(m.num_classes); }, model);
}

Classifier train_model(ModelKind kind, const TrainingSet& train, const ModelConfig& config) {
  switch (kind) {
    case ModelKind::Ann: return ann_train(train, config.ann);
    case ModelKind::Svm: return svm_train(train, config.svm);
    case ModelKind::Dt: return dt_train(train, config.dt);
  }
  throw std::invalid_argument("train_model: unknown kind");
}

int predict(const Classifier& model, std::span<const double> x) {
  switch (model.index()) {
    case 0: return ann_predict(std::get<AnnModel>(model), x);
    case 1: return svm_predict(std::get<SvmModel>(model), x);
    default: return dt_predict(std::get<DtModel>(model), x);
  }
}

EvalReport evaluate(const Classifier& model, const TrainingSet& test) {
  validate(test);
  if (test.input_dim() != input_dim(model))
    throw std::invalid_argument("evaluate: model and dataset feature dimensions differ");
  const auto k = static_cast<std::size_t>(std::max(test.num_classes, output_classes(model)));
  EvalReport rep;
  rep.confusion.assign(k, std::vector<long>(k, 0));
  long correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int pred = predict(model, test.x[i]);
    rep.predictions.push_back(pred);
    rep.misclassified.push_back(pred != test.y[i]);
    ++rep.confusion[static_cast<std::size_t>(test.y[i])][static_cast<std::size_t>(pred)];
    if (pred == test.y[i]) ++correct;
  }
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  for (std::size_t c = 0; c < k; ++c) {
    long row = 0;
    for (long v : rep.confusion[c]) row += v;
    rep.recall.push_back(row > 0 ? std::optional<double>(static_cast<double>(rep.confusion[c][c]) / row)
                                 : std::nullopt);
  }
  return rep;
}

EvalReport binary_task(ModelKind kind, const Dataset& train, const Dataset& test, Question question,
                       const ModelConfig& config) {
  const Classifier model = train_model(kind, to_training_set(train, question), config);
  return evaluate(model, to_training_set(test, question));
}

namespace {

json standardizer_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

Standardizer standardizer_from(const json& j) {
  return {j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("model file: non-finite ") + what);
}

}  // namespace

json model_to_json(const Classifier& model) {
  json j = {{"format_version", kModelFormatVersion}, {"kind", model_name(kind_of(model))}};
  if (const auto* m = std::get_if<AnnModel>(&model)) {
    j["input_dim"] = m->input_dim;
    j["hidden_units"] = m->hidden_units;
    j["num_classes"] = m->num_classes;
    j["W1"] = m->W1;
    j["w1"] = m->w1;
    j["W2"] = m->W2;
    j["w2"] = m->w2;
    j["scaler"] = standardizer_json(m->scaler);
    j["loss_history"] = m->loss_history;
  } else if (const auto* s = std::get_if<SvmModel>(&model)) {
    j["input_dim"] = s->input_dim;
    j["num_classes"] = s->num_classes;
    j["C"] = s->C;
    j["kernel_width"] = s->kernel_width;
    j["scaler"] = standardizer_json(s->scaler);
    json machines = json::array();
    for (const auto& mc : s->machines)
      machines.push_back({{"positive", mc.positive},
                          {"negative", mc.negative},
                          {"support_vectors", mc.support_vectors},
                          {"coef", mc.coef},
                          {"rho", mc.rho},
                          {"converged", mc.converged},
                          {"iterations", mc.iterations}});
    j["machines"] = machines;
  } else {
    const auto& d = std::get<DtModel>(model);
    j["input_dim"] = d.input_dim;
    j["num_classes"] = d.num_classes;
    j["max_depth"] = d.max_depth;
    json nodes = json::array();
    for (const auto& n : d.nodes)
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"depth", n.depth},
                       {"class_counts", n.class_counts},
                       {"prediction", n.prediction}});
    j["nodes"] = nodes;
  }
  return j;
}

Classifier model_from_json(const json& j) {
  if (!j.contains("format_version") || j.at("format_version").get<std::string>() != kModelFormatVersion)
    throw std::invalid_argument("model file: unsupported format_version");
  const ModelKind kind = parse_model(j.at("kind").get<std::string>());
  if (kind == ModelKind::Ann) {
    AnnModel m;
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.hidden_units = j.at("hidden_units").get<std::size_t>();
    m.num_classes = j.at("num_classes").get<std::size_t>();
    m.W1 = j.at("W1").get<std::vector<double>>();
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.W2 = j.at("W2").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.scaler = standardizer_from(j.at("scaler"));
    m.loss_history = j.value("loss_history", std::vector<double>{});
    m.check_shapes();
    for (const auto* v : {&m.W1, &m.w1, &m.W2, &m.w2}) require_finite(*v, "weight");
    return m;
  }
  if (kind == ModelKind::Svm) {
    SvmModel s;
    s.input_dim = j.at("input_dim").get<std::size_t>();
    s.num_classes = j.at("num_classes").get<int>();
    s.C = j.at("C").get<double>();
    s.kernel_width = j.at("kernel_width").get<double>();
    s.scaler = standardizer_from(j.at("scaler"));
    for (const auto& mj : j.at("machines")) {
      SvmBinaryMachine mc;
      mc.positive = mj.at("positive").get<int>();
      mc.negative = mj.at("negative").get<int>();
      mc.support_vectors = mj.at("support_vectors").get<std::vector<std::vector<double>>>();
      mc.coef = mj.at("coef").get<std::vector<double>>();
      mc.rho = mj.at("rho").get<double>();
      mc.converged = mj.value("converged", true);
      mc.iterations = mj.value("iterations", 0L);
      if (mc.coef.size() != mc.support_vectors.size())
        throw std::invalid_argument("model file: svm coefficient count mismatch");
      for (const auto& sv : mc.support_vectors)
        if (sv.size() != s.input_dim) throw std::invalid_argument("model file: svm vector width mismatch");
      for (double c : mc.coef)
        if (std::abs(c) > s.C * (1.0 + 1e-12)) throw std::invalid_argument("model file: svm coefficient outside [0, C]");
      s.machines.push_back(std::move(mc));
    }
    return s;
  }
  DtModel d;
  d.input_dim = j.at("input_dim").get<std::size_t>();
  d.num_classes = j.at("num_classes").get<int>();
  d.max_depth = j.at("max_depth").get<int>();
  for (const auto& nj : j.at("nodes")) {
    DtNode n;
    n.feature = nj.at("feature").get<int>();
    n.threshold = nj.at("threshold").get<double>();
    n.left = nj.at("left").get<int>();
    n.right = nj.at("right").get<int>();
    n.depth = nj.at("depth").get<int>();
    n.class_counts = nj.at("class_counts").get<std::vector<int>>();
    n.prediction = nj.at("prediction").get<int>();
    d.nodes.push_back(std::move(n));
  }
  const auto count = static_cast<int>(d.nodes.size());
  if (count == 0) throw std::invalid_argument("model file: empty tree");
  for (const auto& n : d.nodes) {
    if (n.is_leaf()) continue;
    if (n.feature >= static_cast<int>(d.input_dim) || n.left <= 0 || n.left >= count || n.right <= 0 ||
        n.right >= count)
      throw std::invalid_argument("model file: malformed tree node");
  }
  return d;
}

void save_model(const std::string& path, const Classifier& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model: " + path);
  out << model_to_json(model).dump(2) << '\n';
}

Classifier load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model: " + path);
  return model_from_json(json::parse(in));
}

json report_to_json(const EvalReport& report) {
  json recall = json::array();
  for (const auto& r : report.recall) recall.push_back(r ? json(*r) : json(nullptr));
  return {{"accuracy", report.accuracy},
          {"total", report.total()},
          {"confusion", report.confusion},
          {"recall", recall}};
}

}  // namespace qcorr::ml
