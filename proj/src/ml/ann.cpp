#include "qcorr/ml/ann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "qcorr/seeding.hpp"

namespace qcorr::ml {

AnnModel AnnModel::zeros(std::size_t input_dim, std::size_t hidden_units, std::size_t num_classes) {
  AnnModel m;
  m.input_dim = input_dim;
  m.hidden_units = hidden_units;
  m.num_classes = num_classes;
  m.W1.assign(hidden_units * input_dim, 0.0);
  m.w1.assign(hidden_units, 0.0);
  m.W2.assign(num_classes * hidden_units, 0.0);
  m.w2.assign(num_classes, 0.0);
  m.scaler = Standardizer::identity(input_dim);
  return m;
}

void AnnModel::check_shapes() const {
  if (W1.size() != hidden_units * input_dim || w1.size() != hidden_units ||
      W2.size() != num_classes * hidden_units || w2.size() != num_classes ||
      scaler.mean.size() != input_dim || scaler.scale.size() != input_dim) {
    throw std::invalid_argument("AnnModel: inconsistent shapes");
  }
}

namespace {

struct Activations {
  std::vector<double> input;   // standardized x0
  std::vector<double> hidden;  // x1
  std::vector<double> probs;   // x2
};

void softmax_in_place(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

Activations forward(const AnnModel& m, std::span<const double> x) {
  if (x.size() != m.input_dim) throw std::invalid_argument("ann_forward: input dimension mismatch");
  Activations a;
  a.input = m.scaler.apply(x);
  a.hidden.assign(m.hidden_units, 0.0);
  for (std::size_t h = 0; h < m.hidden_units; ++h) {
    double z = m.w1[h];
    for (std::size_t k = 0; k < m.input_dim; ++k) z += m.W1[h * m.input_dim + k] * a.input[k];
    a.hidden[h] = std::max(z, 0.0);
  }
  a.probs.assign(m.num_classes, 0.0);
  for (std::size_t c = 0; c < m.num_classes; ++c) {
    double z = m.w2[c];
    for (std::size_t h = 0; h < m.hidden_units; ++h) z += m.W2[c * m.hidden_units + h] * a.hidden[h];
    a.probs[c] = z;
  }
  softmax_in_place(a.probs);
  return a;
}

}  // namespace

std::vector<double> ann_forward(const AnnModel& model, std::span<const double> x) {
  model.check_shapes();
  return forward(model, x).probs;
}

int ann_predict(const AnnModel& model, std::span<const double> x) {
  const auto probs = forward(model, x).probs;
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::vector<double> ann_parameters(const AnnModel& model) {
  std::vector<double> p;
  p.reserve(model.W1.size() + model.w1.size() + model.W2.size() + model.w2.size());
  for (const auto* v : {&model.W1, &model.w1, &model.W2, &model.w2}) p.insert(p.end(), v->begin(), v->end());
  return p;
}

void ann_set_parameters(AnnModel& model, std::span<const double> params) {
  std::size_t offset = 0;
  for (auto* v : {&model.W1, &model.w1, &model.W2, &model.w2}) {
    if (offset + v->size() > params.size()) throw std::invalid_argument("ann_set_parameters: too few values");
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), v->size(), v->begin());
    offset += v->size();
  }
  if (offset != params.size()) throw std::invalid_argument("ann_set_parameters: too many values");
}

AnnLossGradient ann_loss_gradient(const AnnModel& m, const TrainingSet& data,
                                  std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("ann_loss_gradient: empty batch");
  const std::size_t nW1 = m.W1.size(), nw1 = m.w1.size(), nW2 = m.W2.size();
  AnnLossGradient out{0.0, std::vector<double>(nW1 + nw1 + nW2 + m.w2.size(), 0.0)};
  double* gW1 = out.gradient.data();
  double* gw1 = gW1 + nW1;
  double* gW2 = gw1 + nw1;
  double* gw2 = gW2 + nW2;
  const double inv_n = 1.0 / static_cast<double>(rows.size());

  std::vector<double> delta_out(m.num_classes), delta_hidden(m.hidden_units);
  for (std::size_t r : rows) {
    const Activations a = forward(m, data.x.at(r));
    const auto target = static_cast<std::size_t>(data.y.at(r));
    out.loss -= std::log(std::max(a.probs[target], 1e-300)) * inv_n;

    // Softmax with cross-entropy: dL/dz = p - onehot.
    for (std::size_t c = 0; c < m.num_classes; ++c)
      delta_out[c] = (a.probs[c] - (c == target ? 1.0 : 0.0)) * inv_n;
    std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
    for (std::size_t c = 0; c < m.num_classes; ++c) {
      gw2[c] += delta_out[c];
      for (std::size_t h = 0; h < m.hidden_units; ++h) {
        gW2[c * m.hidden_units + h] += delta_out[c] * a.hidden[h];
        delta_hidden[h] += delta_out[c] * m.W2[c * m.hidden_units + h];
      }
    }
    for (std::size_t h = 0; h < m.hidden_units; ++h) {
      if (a.hidden[h] <= 0.0) continue;
      gw1[h] += delta_hidden[h];
      for (std::size_t k = 0; k < m.input_dim; ++k)
        gW1[h * m.input_dim + k] += delta_hidden[h] * a.input[k];
    }
  }
  return out;
}

double ann_loss(const AnnModel& model, const TrainingSet& data, std::span<const std::size_t> rows) {
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto probs = forward(model, data.x.at(r)).probs;
    loss -= std::log(std::max(probs[static_cast<std::size_t>(data.y.at(r))], 1e-300));
  }
  return loss / static_cast<double>(rows.size());
}

AnnModel ann_train(const TrainingSet& train, const AnnConfig& config) {
  validate(train);
  if (std::set<int>(train.y.begin(), train.y.end()).size() < 2)
    throw std::invalid_argument("ann_train: need at least two classes in the training data");
  if (config.input_dim != 0 && config.input_dim != train.input_dim())
    throw std::invalid_argument("ann_train: configured input_dim does not match the data");
  if (config.hidden_units == 0 || config.batch == 0 || config.epochs < 0)
    throw std::invalid_argument("ann_train: invalid configuration");

  AnnModel model = AnnModel::zeros(train.input_dim(), config.hidden_units,
                                   static_cast<std::size_t>(train.num_classes));
  model.scaler = Standardizer::fit(train);

  // He initialization for the ReLU layer, Glorot for the softmax layer.
  std::mt19937_64 rng(derive_seed(config.seed, "ann-init"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double s1 = std::sqrt(2.0 / static_cast<double>(model.input_dim));
  const double s2 = std::sqrt(2.0 / static_cast<double>(model.hidden_units + model.num_classes));
  for (double& w : model.W1) w = s1 * gauss(rng);
  for (double& w : model.W2) w = s2 * gauss(rng);

  std::vector<double> params = ann_parameters(model);
  std::vector<double> mean_square(params.size(), 0.0);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, "ann-shuffle"));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t stop = std::min(order.size(), start + config.batch);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const AnnLossGradient lg = ann_loss_gradient(model, train, batch);
      if (!std::isfinite(lg.loss)) {
        throw std::runtime_error("ann_train: loss became non-finite at epoch " +
                                 std::to_string(epoch) + ", batch starting " +
                                 std::to_string(start));
      }
      epoch_loss += lg.loss * static_cast<double>(batch.size());
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = lg.gradient[i];
        mean_square[i] = config.decay * mean_square[i] + (1.0 - config.decay) * g * g;
        params[i] -= config.learning_rate * g / (std::sqrt(mean_square[i]) + config.epsilon);
      }
      ann_set_parameters(model, params);
    }
    model.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return model;
}

}  // namespace qcorr::ml
