#include "nnxml/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

std::size_t hits_in_prefix(const RankedPrediction& pred, std::span<const std::size_t> truth,
                           std::size_t k, std::vector<bool>* flags = nullptr) {
  const std::unordered_set<std::size_t> truth_set(truth.begin(), truth.end());
  const std::size_t depth = std::min(k, pred.top_n.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    const bool hit = truth_set.count(pred.top_n[i].label) > 0;
    hits += hit;
    if (flags) flags->push_back(hit);
  }
  return hits;
}

}  // namespace

RankedPrediction rank_scores(std::vector<double> scores, std::size_t n) {
  RankedPrediction pred;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(n, scores.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                    });
  pred.top_n.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) pred.top_n.push_back({order[i], scores[order[i]]});
  pred.scores = std::move(scores);
  return pred;
}

RankedPrediction predict_labels(std::span<const double> x_row, const RegressorModel& m,
                                const EncoderStack& stack, std::size_t n) {
  if (n == 0) throw ConfigError("predict_labels: n must be >= 1");
  if (m.output_dim() != stack.latent_dim()) {
    throw ShapeError("predict_labels: regressor emits " + std::to_string(m.output_dim()) +
                     " latent values, stack expects " + std::to_string(stack.latent_dim()));
  }
  const auto latent = predict_latent(x_row, m);
  const DenseMatrix w(1, latent.size(), latent);
  const DenseMatrix scores = decode(w, stack);
  return rank_scores({scores.values().begin(), scores.values().end()}, n);
}

double precision_at_k(const RankedPrediction& pred, std::span<const std::size_t> truth,
                      std::size_t k) {
  if (k == 0) throw ConfigError("precision_at_k: k must be >= 1");
  return static_cast<double>(hits_in_prefix(pred, truth, k)) / static_cast<double>(k);
}

double ndcg_at_k(const RankedPrediction& pred, std::span<const std::size_t> truth,
                 std::size_t k) {
  if (k == 0) throw ConfigError("ndcg_at_k: k must be >= 1");
  if (truth.empty()) throw ValueError("ndcg_at_k: truth label set is empty");
  std::vector<bool> flags;
  hits_in_prefix(pred, truth, k, &flags);
  double dcg = 0.0;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  const std::unordered_set<std::size_t> distinct(truth.begin(), truth.end());
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, distinct.size()); ++i)
    ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / ideal;
}

TrainTestSplit split_rows(std::size_t n, double holdout, RngSeed seed) {
  if (!(holdout >= 0.0 && holdout < 1.0)) throw ConfigError("split: holdout must be in [0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * holdout));
  TrainTestSplit split;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::vector<MetricRow> evaluate_rankings(std::span<const RankedPrediction> preds,
                                         std::span<const std::vector<std::size_t>> truth,
                                         std::span<const std::size_t> ks) {
  if (preds.size() != truth.size()) {
    throw ShapeError("evaluate_rankings: " + std::to_string(preds.size()) +
                     " predictions vs " + std::to_string(truth.size()) + " truth sets");
  }
  std::vector<MetricRow> rows;
  for (std::size_t k : ks) {
    MetricRow row;
    row.k = k;
    std::size_t ndcg_count = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      row.precision += precision_at_k(preds[i], truth[i], k);
      if (!truth[i].empty()) {
        row.ndcg += ndcg_at_k(preds[i], truth[i], k);
        ++ndcg_count;
      }
    }
    if (!preds.empty()) row.precision /= static_cast<double>(preds.size());
    if (ndcg_count > 0) row.ndcg /= static_cast<double>(ndcg_count);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nnxml
