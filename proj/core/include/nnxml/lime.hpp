#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnxml/rng.hpp"

namespace nnxml {

/// Black-box scalar output of a model, evaluated on a full feature vector.
using ScalarFn = std::function<double(std::span<const double>)>;

struct LimeConfig {
  std::size_t num_samples = 1000;
  /// Defaults to 0.75 * sqrt(d).
  std::optional<double> kernel_width;
  std::size_t k_features = 6;
  RngSeed seed{};
  /// Value written into masked-off features. Either empty (all zeros), a
  /// single value for every feature, or one value per feature.
  std::vector<double> baseline;
};

struct FeatureWeight {
  std::size_t feature = 0;
  double weight = 0.0;

  friend bool operator==(const FeatureWeight&, const FeatureWeight&) = default;
};

struct SurrogateExplanation {
  /// Selected interpretable features, descending |weight|, ties by index.
  std::vector<FeatureWeight> feature_weights;
  double intercept = 0.0;
  double local_fit_r2 = 0.0;
  /// Set when the black box was constant over every sample; weights are
  /// then empty and local_fit_r2 is 0.
  bool degenerate = false;
  std::string target;

  friend bool operator==(const SurrogateExplanation&, const SurrogateExplanation&) = default;
};

/// Local surrogate around x_row.
///
/// Draws num_samples binary masks z (each coordinate kept with probability
/// 1/2), evaluates predict_fn on x with masked-off coordinates replaced by
/// the baseline, weighs sample s by exp(-h_s^2 / width^2) where h_s is the
/// number of masked coordinates, greedily adds the feature that most reduces
/// the weighted residual sum of squares until k_features are chosen, and
/// reports the weighted least-squares fit (with intercept) on that set.
///
/// Throws ConfigError if num_samples < k_features + 2 and ValueError if
/// predict_fn returns a non-finite value.
SurrogateExplanation lime_explain(std::span<const double> x_row, const ScalarFn& predict_fn,
                                  const LimeConfig& cfg);

}  // namespace nnxml
