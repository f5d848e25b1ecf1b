#include "nnxml/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace nnxml {
namespace {

using nlohmann::ordered_json;

double rounded(double v) { return std::stod(format_number(v)); }

void render_node(const HierarchyNode& node, std::size_t indent, std::ostringstream& out) {
  out << std::string(indent, ' ') << 'H' << node.layer << ", unit " << node.unit_index << ':';
  if (node.layer == 1) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const auto& c = node.children[i];
      out << (i ? ", " : " ")
          << (c.label_name.empty() ? std::to_string(c.unit_index) : c.label_name);
    }
    out << '\n';
    return;
  }
  out << " H" << node.layer - 1 << " units";
  for (std::size_t i = 0; i < node.children.size(); ++i)
    out << (i ? ", " : " ") << node.children[i].unit_index;
  out << '\n';
  for (const auto& c : node.children) render_node(c, indent + 2, out);
}

ordered_json hierarchy_json(const HierarchyNode& node) {
  ordered_json j;
  j["layer"] = node.layer;
  j["unit"] = node.unit_index;
  j["weight"] = rounded(node.weight);
  if (node.layer == 0) j["label"] = node.label_name;
  ordered_json children = ordered_json::array();
  for (const auto& c : node.children) children.push_back(hierarchy_json(c));
  j["children"] = std::move(children);
  return j;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string label_display_name(std::size_t j, std::span<const std::string> names) {
  return j < names.size() ? names[j] : std::to_string(j);
}

std::string render_hierarchy(const HierarchyNode& node) {
  if (node.layer == 0) {
    return (node.label_name.empty() ? std::to_string(node.unit_index) : node.label_name) + "\n";
  }
  std::ostringstream out;
  render_node(node, 0, out);
  return out.str();
}

std::string render_explanation_text(const ExplanationReport& r,
                                    std::span<const std::string> names) {
  std::ostringstream out;
  out << "target: " << r.surrogate.target << '\n';
  out << "latent:";
  for (double v : r.latent) out << ' ' << format_number(v);
  out << '\n';
  out << "dominant unit: H" << r.hierarchy.layer << " unit " << r.unit
      << (r.degenerate_latent ? " (degenerate: zero latent prediction)" : "") << '\n';
  out << "surrogate r2: " << format_number(r.surrogate.local_fit_r2)
      << (r.surrogate.degenerate ? " (degenerate: constant output)" : "") << '\n';
  out << "surrogate intercept: " << format_number(r.surrogate.intercept) << '\n';
  out << "features:\n";
  for (const auto& fw : r.surrogate.feature_weights)
    out << "  " << fw.feature << ' ' << format_number(fw.weight) << '\n';
  out << "hierarchy:\n";
  std::istringstream tree(render_hierarchy(r.hierarchy));
  for (std::string line; std::getline(tree, line);) out << "  " << line << '\n';
  out << "top labels:\n";
  for (std::size_t i = 0; i < r.top_labels.size(); ++i) {
    const auto& l = r.top_labels[i];
    out << "  " << i + 1 << ' ' << label_display_name(l.label, names) << ' '
        << format_number(l.score) << '\n';
  }
  return out.str();
}

std::string render_explanation_json(const ExplanationReport& r,
                                    std::span<const std::string> names) {
  ordered_json j;
  j["target"] = r.surrogate.target;
  j["target_kind"] = r.target_kind == ExplainTarget::latent_unit ? "latent_unit" : "label_score";
  j["target_index"] = r.target_index;
  ordered_json latent = ordered_json::array();
  for (double v : r.latent) latent.push_back(rounded(v));
  j["latent"] = std::move(latent);
  j["unit"] = r.unit;
  j["degenerate_latent"] = r.degenerate_latent;
  ordered_json s;
  s["intercept"] = rounded(r.surrogate.intercept);
  s["local_fit_r2"] = rounded(r.surrogate.local_fit_r2);
  s["degenerate"] = r.surrogate.degenerate;
  ordered_json fws = ordered_json::array();
  for (const auto& fw : r.surrogate.feature_weights)
    fws.push_back({{"feature", fw.feature}, {"weight", rounded(fw.weight)}});
  s["feature_weights"] = std::move(fws);
  j["surrogate"] = std::move(s);
  j["hierarchy"] = hierarchy_json(r.hierarchy);
  ordered_json top = ordered_json::array();
  for (const auto& l : r.top_labels) {
    top.push_back({{"label", l.label},
                   {"name", label_display_name(l.label, names)},
                   {"score", rounded(l.score)}});
  }
  j["top_labels"] = std::move(top);
  return j.dump(2) + "\n";
}

std::string render_predictions_tsv(std::span<const std::size_t> rows,
                                   std::span<const RankedPrediction> preds,
                                   std::span<const std::string> names) {
  std::ostringstream out;
  out << "row\trank\tlabel\tname\tscore\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& top = preds[i].top_n;
    for (std::size_t r = 0; r < top.size(); ++r) {
      out << rows[i] << '\t' << r + 1 << '\t' << top[r].label << '\t'
          << label_display_name(top[r].label, names) << '\t' << format_number(top[r].score)
          << '\n';
    }
  }
  return out.str();
}

std::string render_metrics(std::span<const MetricRow> rows) {
  std::ostringstream out;
  char buf[96];
  for (const auto& m : rows) {
    std::snprintf(buf, sizeof(buf), "P@%zu = %.6f  nDCG@%zu = %.6f\n", m.k, m.precision, m.k,
                  m.ndcg);
    out << buf;
  }
  return out.str();
}

}  // namespace nnxml
