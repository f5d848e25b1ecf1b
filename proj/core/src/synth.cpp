#include "nnxml/synth.hpp"

#include "nnxml/errors.hpp"

namespace nnxml {

PlantedDataset generate_planted(const SynthConfig& cfg) {
  if (cfg.blocks == 0 || cfg.labels_per_block == 0 || cfg.rows == 0) {
    throw ConfigError("gen-synth: blocks, rows and labels-per-block must be >= 1");
  }
  if (!(cfg.noise >= 0.0 && cfg.noise <= 1.0)) {
    throw ConfigError("gen-synth: noise must be in [0, 1]");
  }
  Rng rng(cfg.seed);
  PlantedDataset out;
  out.block_of_row.resize(cfg.rows);
  for (std::size_t i = 0; i < cfg.rows; ++i) out.block_of_row[i] = i % cfg.blocks;
  rng.shuffle(std::span<std::size_t>(out.block_of_row));

  const std::size_t p = cfg.blocks * cfg.labels_per_block;
  std::vector<LabelEntry> entries;
  FeatureMatrix features(cfg.rows, cfg.blocks);
  for (std::size_t i = 0; i < cfg.rows; ++i) {
    const std::size_t b = out.block_of_row[i];
    features(i, b) = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      bool on = j / cfg.labels_per_block == b;
      if (rng.bernoulli(cfg.noise)) on = !on;
      if (on) entries.push_back({i, j, 1.0});
    }
  }
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t j = 0; j < p; ++j) {
    names.push_back("block" + std::to_string(j / cfg.labels_per_block) + "_label" +
                    std::to_string(j % cfg.labels_per_block));
  }
  out.data.features = std::move(features);
  out.data.labels = LabelMatrix(cfg.rows, p, std::move(entries), std::move(names));
  return out;
}

}  // namespace nnxml
