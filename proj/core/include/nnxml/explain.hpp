#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnxml/autoencoder.hpp"
#include "nnxml/hierarchy.hpp"
#include "nnxml/lime.hpp"
#include "nnxml/ranking.hpp"
#include "nnxml/regressor.hpp"

namespace nnxml {

enum class ExplainTarget { latent_unit, label_score };

struct ExplainConfig {
  LimeConfig lime;
  /// Children kept per hierarchy node.
  std::size_t top_m = 5;
  /// When set, explain this label's decoded score instead of a latent unit.
  std::optional<std::size_t> target_label;
  /// Length of the predicted label list attached to the report.
  std::size_t top_n = 25;
};

struct ExplanationReport {
  std::vector<double> latent;  // clamped latent prediction
  /// Top-layer unit whose hierarchy is attached: the largest latent value, or
  /// for a label target the unit contributing most to that label's score.
  std::size_t unit = 0;
  /// The latent prediction was all zeros, so `unit` fell back to 0.
  bool degenerate_latent = false;
  ExplainTarget target_kind = ExplainTarget::latent_unit;
  std::size_t target_index = 0;
  SurrogateExplanation surrogate;
  HierarchyNode hierarchy;
  std::vector<RankedLabel> top_labels;
};

/// Finds the dominant latent unit of predict_latent(x_row), fits the local
/// surrogate to that unit's output (or to a label score), and attaches the
/// unit's label hierarchy from the top encoder layer.
ExplanationReport explain_prediction(std::span<const double> x_row, const RegressorModel& m,
                                     const EncoderStack& stack, const ExplainConfig& cfg,
                                     std::span<const std::string> label_names = {});

}  // namespace nnxml
