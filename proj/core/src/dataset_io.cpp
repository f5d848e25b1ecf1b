#include "nnxml/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::size_t parse_index(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

double parse_value(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError("bad feature value '" + std::string(tok) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite feature value", line);
  return v;
}

std::string format_shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  const auto header = split_ws(line);
  if (header.size() != 3) {
    throw ParseError("header must be 'n_rows n_features n_labels'", 1);
  }
  const std::size_t n_rows = parse_index(header[0], 1, "row count");
  const std::size_t n_features = parse_index(header[1], 1, "feature count");
  const std::size_t n_labels = parse_index(header[2], 1, "label count");

  FeatureMatrix features(n_rows, n_features);
  std::vector<LabelEntry> labels;
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (row >= n_rows) {
      throw ParseError("more instance lines than the " + std::to_string(n_rows) +
                           " declared in the header",
                       line_no);
    }
    std::string_view rest(line);
    if (!rest.empty() && !is_space(rest.front())) {
      std::size_t end = 0;
      while (end < rest.size() && !is_space(rest[end])) ++end;
      std::string_view field = rest.substr(0, end);
      rest.remove_prefix(end);
      std::size_t prev = 0;
      bool first = true;
      while (true) {
        const std::size_t comma = field.find(',');
        const std::string_view tok = field.substr(0, comma);
        const std::size_t label = parse_index(tok, line_no, "label index");
        if (label >= n_labels) {
          throw ParseError("label index " + std::to_string(label) + " out of range [0, " +
                               std::to_string(n_labels) + ")",
                           line_no);
        }
        if (!first && label <= prev) {
          throw ParseError("label indices must be strictly increasing", line_no);
        }
        labels.push_back({row, label, 1.0});
        prev = label;
        first = false;
        if (comma == std::string_view::npos) break;
        field.remove_prefix(comma + 1);
      }
    }
    std::unordered_set<std::size_t> seen;
    for (std::string_view tok : split_ws(rest)) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("feature '" + std::string(tok) + "' is not index:value", line_no);
      }
      const std::size_t f = parse_index(tok.substr(0, colon), line_no, "feature index");
      if (f >= n_features) {
        throw ParseError("feature index " + std::to_string(f) + " out of range [0, " +
                             std::to_string(n_features) + ")",
                         line_no);
      }
      if (!seen.insert(f).second) {
        throw ParseError("duplicate feature index " + std::to_string(f), line_no);
      }
      features(row, f) = parse_value(tok.substr(colon + 1), line_no);
    }
    ++row;
  }
  if (row != n_rows) {
    throw ParseError("header declares " + std::to_string(n_rows) + " rows but " +
                         std::to_string(row) + " were found",
                     line_no + 1);
  }
  return Dataset{std::move(features), LabelMatrix(n_rows, n_labels, std::move(labels))};
}

Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<std::filesystem::path>& names_path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  Dataset data;
  try {
    data = parse_dataset(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
  std::filesystem::path names = names_path.value_or(default_names_path(path));
  if (names_path || std::filesystem::exists(names)) {
    data.labels.set_label_names(load_label_names(names));
  }
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const auto& v = data.labels;
  if (data.features.rows() != v.n_rows()) {
    throw ShapeError("write_dataset: " + std::to_string(data.features.rows()) +
                     " feature rows vs " + std::to_string(v.n_rows()) + " label rows");
  }
  out << v.n_rows() << ' ' << data.features.cols() << ' ' << v.n_labels() << '\n';
  for (std::size_t r = 0; r < v.n_rows(); ++r) {
    auto cols = v.row_cols(r);
    auto vals = v.row_values(r);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      if (vals[t] != 1.0) {
        throw ValueError("write_dataset: label value at (" + std::to_string(r) + ", " +
                         std::to_string(cols[t]) + ") is not 1");
      }
      if (t) out << ',';
      out << cols[t];
    }
    auto f = data.features.row(r);
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (f[j] == 0.0) continue;
      out << ' ' << j << ':' << format_shortest(f[j]);
    }
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path.string() + "'");
  write_dataset(out, data);
  if (data.labels.has_label_names()) {
    save_label_names(default_names_path(path), data.labels.label_names());
  }
}

std::vector<std::string> load_label_names(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label names '" + path.string() + "'");
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names.push_back(line);
  }
  return names;
}

void save_label_names(const std::filesystem::path& path, const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write label names '" + path.string() + "'");
  for (const auto& n : names) out << n << '\n';
}

std::filesystem::path default_names_path(const std::filesystem::path& data_path) {
  return std::filesystem::path(data_path.string() + ".names");
}

}  // namespace nnxml
