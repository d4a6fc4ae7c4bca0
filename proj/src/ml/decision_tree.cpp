#include "qcorr/ml/decision_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qcorr::ml {

int DtModel::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t DtModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const DtNode& n) { return n.is_leaf(); }));
}

double gini_impurity(std::span<const int> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // weighted child impurity
};

class Grower {
 public:
  Grower(const TrainingSet& data, DtModel& model) : data_(data), model_(model) {}

  int grow(std::vector<std::size_t> rows, int depth) {
    DtNode node;
    node.depth = depth;
    node.class_counts.assign(static_cast<std::size_t>(model_.num_classes), 0);
    for (std::size_t r : rows) ++node.class_counts[static_cast<std::size_t>(data_.y[r])];
    // max_element returns the first maximum, so ties go to the lower class.
    node.prediction = static_cast<int>(
        std::max_element(node.class_counts.begin(), node.class_counts.end()) - node.class_counts.begin());
    const double parent = gini_impurity(node.class_counts);
    const int id = static_cast<int>(model_.nodes.size());
    model_.nodes.push_back(node);
    if (depth >= model_.max_depth || parent <= 0.0 || rows.size() < 2) return id;

    const Split best = best_split(rows);
    if (best.feature < 0 || best.score >= parent - 1e-15) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows)
      (data_.x[r][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    DtNode& self = model_.nodes[static_cast<std::size_t>(id)];
    self.feature = best.feature;
    self.threshold = best.threshold;
    self.left = l;
    self.right = r;
    return id;
  }

 private:
  Split best_split(const std::vector<std::size_t>& rows) const {
    const auto k = static_cast<std::size_t>(model_.num_classes);
    const double n = static_cast<double>(rows.size());
    Split best;
    std::vector<int> total(k, 0);
    for (std::size_t r : rows) ++total[static_cast<std::size_t>(data_.y[r])];

    for (std::size_t f = 0; f < model_.input_dim; ++f) {
      std::vector<std::size_t> sorted = rows;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::size_t a, std::size_t b) { return data_.x[a][f] < data_.x[b][f]; });
      std::vector<int> left(k, 0), right = total;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto cls = static_cast<std::size_t>(data_.y[sorted[i]]);
        ++left[cls];
        --right[cls];
        const double v = data_.x[sorted[i]][f], next = data_.x[sorted[i + 1]][f];
        if (!(v < next)) continue;
        const double nl = static_cast<double>(i + 1);
        const double score = (nl * gini_impurity(left) + (n - nl) * gini_impurity(right)) / n;
        // Strict comparison keeps the earlier feature and smaller threshold on ties.
        if (best.feature < 0 || score < best.score) {
          best.feature = static_cast<int>(f);
          best.threshold = v + (next - v) / 2.0;
          best.score = score;
        }
      }
    }
    return best;
  }

  const TrainingSet& data_;
  DtModel& model_;
};

}  // namespace

DtModel dt_train(const TrainingSet& train, const DtConfig& config) {
  validate(train);
  if (config.max_depth < 1) throw std::invalid_argument("dt_train: max_depth must be at least 1");
  DtModel model;
  model.input_dim = train.input_dim();
  model.num_classes = train.num_classes;
  model.max_depth = config.max_depth;
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  Grower(train, model).grow(std::move(rows), 0);
  return model;
}

int dt_predict(const DtModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) throw std::invalid_argument("dt_predict: input dimension mismatch");
  const DtNode* node = &model.nodes.at(0);
  while (!node->is_leaf())
    node = &model.nodes[static_cast<std::size_t>(
        x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right)];
  return node->prediction;
}

}  // namespace qcorr::ml
