#include "nnxml/hierarchy.hpp"

#include <algorithm>
#include <numeric>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

void expand(const EncoderStack& stack, HierarchyNode& node, std::size_t m,
            std::span<const std::string> names) {
  if (node.layer == 0) {
    if (!names.empty()) node.label_name = names[node.unit_index];
    return;
  }
  const DenseMatrix& h = stack.layer(node.layer);
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < h.rows(); ++r)
    if (h(r, node.unit_index) > 0.0) order.push_back(r);
  const std::size_t keep = std::min(m, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double wa = h(a, node.unit_index);
                      const double wb = h(b, node.unit_index);
                      return wa != wb ? wa > wb : a < b;
                    });
  node.children.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    HierarchyNode child;
    child.layer = node.layer - 1;
    child.unit_index = order[i];
    child.weight = h(order[i], node.unit_index);
    expand(stack, child, m, names);
    node.children.push_back(std::move(child));
  }
}

}  // namespace

HierarchyNode extract_hierarchy(const EncoderStack& stack, std::size_t layer, std::size_t unit,
                                std::size_t m, std::span<const std::string> label_names) {
  if (layer < 1 || layer > stack.depth()) {
    throw IndexError("hierarchy: layer " + std::to_string(layer) + " outside [1, " +
                     std::to_string(stack.depth()) + "]");
  }
  const std::size_t width = stack.layer(layer).cols();
  if (unit >= width) {
    throw IndexError("hierarchy: unit " + std::to_string(unit) + " outside [0, " +
                     std::to_string(width) + ") for layer " + std::to_string(layer));
  }
  if (m == 0) throw ConfigError("hierarchy: top-m must be >= 1");
  if (!label_names.empty() && label_names.size() != stack.n_labels()) {
    throw ShapeError("hierarchy: " + std::to_string(label_names.size()) +
                     " label names for " + std::to_string(stack.n_labels()) + " labels");
  }
  HierarchyNode root;
  root.layer = layer;
  root.unit_index = unit;
  root.weight = 1.0;
  expand(stack, root, m, label_names);
  return root;
}

}  // namespace nnxml
