#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nnxml/autoencoder.hpp"
#include "nnxml/regressor.hpp"
#include "nnxml/rng.hpp"

namespace nnxml {

struct RankedLabel {
  std::size_t label = 0;
  double score = 0.0;

  friend bool operator==(const RankedLabel&, const RankedLabel&) = default;
};

/// Decoded label scores plus the top-N list, ordered by descending score with
/// ties broken by ascending label index.
struct RankedPrediction {
  std::vector<double> scores;
  std::vector<RankedLabel> top_n;
};

/// Ranks an arbitrary score vector; top_n has min(n, scores.size()) entries.
RankedPrediction rank_scores(std::vector<double> scores, std::size_t n);

/// scores = decode(predict_latent(x_row)). Throws ConfigError for n == 0.
RankedPrediction predict_labels(std::span<const double> x_row, const RegressorModel& m,
                                const EncoderStack& stack, std::size_t n);

/// |top-k ∩ truth| / k.
double precision_at_k(const RankedPrediction& pred, std::span<const std::size_t> truth,
                      std::size_t k);

/// Binary-gain nDCG: sum_{i<k} rel_i / log2(i + 2) divided by the ideal DCG
/// of min(k, |truth|) relevant items. Throws ValueError for empty truth.
double ndcg_at_k(const RankedPrediction& pred, std::span<const std::size_t> truth,
                 std::size_t k);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n); the first round(n * holdout) indices become the
/// test rows. Both lists are returned in ascending order.
TrainTestSplit split_rows(std::size_t n, double holdout, RngSeed seed);

struct MetricRow {
  std::size_t k = 0;
  double precision = 0.0;
  double ndcg = 0.0;
};

/// Mean P@k and nDCG@k over instances. Instances with no true labels are
/// skipped for nDCG.
std::vector<MetricRow> evaluate_rankings(std::span<const RankedPrediction> preds,
                                         std::span<const std::vector<std::size_t>> truth,
                                         std::span<const std::size_t> ks);

}  // namespace nnxml
