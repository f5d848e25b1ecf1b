#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nnxml/matrix.hpp"
#include "nnxml/regressor.hpp"

namespace nnxml {

struct Dataset {
  FeatureMatrix features;
  LabelMatrix labels;
};

/// Parses the multi-label text format:
///
///   n_rows n_features n_labels
///   l1,l2,... f:v f:v ...
///
/// one line per instance. The label field is a comma-separated list of
/// strictly increasing label indices and may be empty (the line then starts
/// with whitespace). Feature pairs are index:value with unique, in-bound
/// indices and finite values. Label entries are 1.0.
///
/// Errors are ParseError carrying the 1-based line number.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<std::filesystem::path>& names_path = std::nullopt);

/// Writes the same format. Only non-zero features are written; values use
/// the shortest round-trip decimal form so a re-parse is exact. Labels are
/// written by index only, so every stored label value must be 1.0.
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

/// One name per line, LF separated.
std::vector<std::string> load_label_names(const std::filesystem::path& path);
void save_label_names(const std::filesystem::path& path, const std::vector<std::string>& names);

/// Sidecar name file conventionally stored next to a dataset.
std::filesystem::path default_names_path(const std::filesystem::path& data_path);

}  // namespace nnxml
