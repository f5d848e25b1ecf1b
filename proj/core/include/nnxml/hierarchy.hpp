#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nnxml/autoencoder.hpp"

namespace nnxml {

/// One unit of the label hierarchy. Layer 0 nodes are original labels,
/// layers 1..L are latent units. `weight` is the raw entry of the parent's
/// H column that links the parent to this node (the root carries 1).
struct HierarchyNode {
  std::size_t layer = 0;
  std::size_t unit_index = 0;
  double weight = 1.0;
  std::string label_name;  // layer 0 only; empty when no names are known
  std::vector<HierarchyNode> children;
};

/// Expands unit `unit` of layer `layer` (1-based) through column `unit` of
/// H_layer: its children are the m largest strictly positive entries,
/// descending by weight with ties broken by ascending index, and each child
/// is expanded the same way down to layer 0.
///
/// Throws IndexError for a layer outside [1, L] or a unit >= k_layer,
/// ConfigError for m == 0, ShapeError if label_names is non-empty but does
/// not have one name per label.
HierarchyNode extract_hierarchy(const EncoderStack& stack, std::size_t layer, std::size_t unit,
                                std::size_t m, std::span<const std::string> label_names = {});

}  // namespace nnxml
