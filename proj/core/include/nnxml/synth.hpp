#pragma once

#include <cstddef>
#include <vector>

#include "nnxml/dataset_io.hpp"
#include "nnxml/rng.hpp"

namespace nnxml {

struct SynthConfig {
  std::size_t blocks = 4;
  std::size_t rows = 200;
  std::size_t labels_per_block = 10;
  /// Probability of flipping each label indicator.
  double noise = 0.05;
  RngSeed seed{};
};

struct PlantedDataset {
  Dataset data;
  std::vector<std::size_t> block_of_row;
};

/// Planted block data: rows are split evenly over blocks (block i % B, then
/// shuffled), each block owns labels [b * L, (b + 1) * L), every label
/// indicator is flipped with probability `noise`, and the features are the
/// one-hot block indicator. Labels are named "block<b>_label<j>".
PlantedDataset generate_planted(const SynthConfig& cfg);

}  // namespace nnxml
