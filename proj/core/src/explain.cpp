#include "nnxml/explain.hpp"

#include <algorithm>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

std::size_t argmax_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

ExplanationReport explain_prediction(std::span<const double> x_row, const RegressorModel& m,
                                     const EncoderStack& stack, const ExplainConfig& cfg,
                                     std::span<const std::string> label_names) {
  if (m.output_dim() != stack.latent_dim()) {
    throw ShapeError("explain: regressor emits " + std::to_string(m.output_dim()) +
                     " latent values, stack expects " + std::to_string(stack.latent_dim()));
  }
  ExplanationReport report;
  report.latent = predict_latent(x_row, m);
  report.degenerate_latent =
      std::all_of(report.latent.begin(), report.latent.end(), [](double v) { return v == 0.0; });

  const RankedPrediction pred = predict_labels(x_row, m, stack, std::max<std::size_t>(1, cfg.top_n));
  report.top_labels = pred.top_n;

  ScalarFn fn;
  if (cfg.target_label) {
    const std::size_t label = *cfg.target_label;
    if (label >= stack.n_labels()) {
      throw IndexError("explain: target label " + std::to_string(label) + " outside [0, " +
                       std::to_string(stack.n_labels()) + ")");
    }
    report.target_kind = ExplainTarget::label_score;
    report.target_index = label;
    const DenseMatrix e = stack.combined();
    std::vector<double> contribution(report.latent.size());
    for (std::size_t u = 0; u < contribution.size(); ++u)
      contribution[u] = report.latent[u] * e(label, u);
    report.unit = argmax_first(contribution);
    fn = [&m, &stack, label](std::span<const double> x) {
      return predict_labels(x, m, stack, 1).scores[label];
    };
    report.surrogate.target = "label " + std::to_string(label);
  } else {
    report.unit = argmax_first(report.latent);
    report.target_kind = ExplainTarget::latent_unit;
    report.target_index = report.unit;
    const std::size_t unit = report.unit;
    fn = [&m, unit](std::span<const double> x) { return predict_latent(x, m)[unit]; };
  }

  const std::string target = report.surrogate.target;
  report.surrogate = lime_explain(x_row, fn, cfg.lime);
  report.surrogate.target =
      target.empty() ? "H" + std::to_string(stack.depth()) + " unit " +
                           std::to_string(report.unit)
                     : target;
  report.hierarchy = extract_hierarchy(stack, stack.depth(), report.unit,
                                       std::max<std::size_t>(1, cfg.top_m), label_names);
  return report;
}

}  // namespace nnxml
