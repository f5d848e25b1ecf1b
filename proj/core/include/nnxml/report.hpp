#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nnxml/explain.hpp"
#include "nnxml/hierarchy.hpp"
#include "nnxml/ranking.hpp"

namespace nnxml {

/// printf("%.6g"). Every number a report prints goes through here.
std::string format_number(double v);

/// Name of label j, or its index when no names are known.
std::string label_display_name(std::size_t j, std::span<const std::string> names);

/// Layer-1 nodes render as one line listing their labels:
///   H1, unit 64: garlic, onion, chicken stock, silverside, garlic bread
/// Deeper nodes list their child units and nest the children two spaces in:
///   H2, unit 9: H1 units 64, 34, 11
///     H1, unit 64: ...
std::string render_hierarchy(const HierarchyNode& node);

/// Line-oriented human-readable explanation.
std::string render_explanation_text(const ExplanationReport& report,
                                    std::span<const std::string> label_names);
/// Structured form of the same report (JSON, 2-space indent, trailing LF).
std::string render_explanation_json(const ExplanationReport& report,
                                    std::span<const std::string> label_names);

/// Tab-separated: row, rank, label, name, score. One header line.
std::string render_predictions_tsv(std::span<const std::size_t> rows,
                                   std::span<const RankedPrediction> preds,
                                   std::span<const std::string> label_names);

/// One line per cutoff: "P@k = 0.950000  nDCG@k = 0.961000". Metrics are
/// fractions, so they print with six decimals.
std::string render_metrics(std::span<const MetricRow> rows);

}  // namespace nnxml
