#include "nnxml/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nnxml/errors.hpp"
#include "nnxml/parallel.hpp"

namespace nnxml {
namespace {

std::string shape_of(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ShapeError("DenseMatrix: " + std::to_string(values_.size()) +
                     " values for shape " + shape_of(rows, cols));
  }
  if (!all_finite()) throw ValueError("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("DenseMatrix::from_rows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(values));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> rows) const {
  DenseMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= rows_) throw IndexError("select_rows: row index out of range");
    std::copy_n(row(rows[i]).begin(), cols_, out.row(i).begin());
  }
  return out;
}

std::vector<double> DenseMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, c);
  return out;
}

double DenseMatrix::min_value() const {
  if (values_.empty()) return 0.0;
  return *std::min_element(values_.begin(), values_.end());
}

double DenseMatrix::max_value() const {
  if (values_.empty()) return 0.0;
  return *std::max_element(values_.begin(), values_.end());
}

bool DenseMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string DenseMatrix::shape_string() const { return shape_of(rows_, cols_); }

LabelMatrix::LabelMatrix(std::size_t n_rows, std::size_t n_labels,
                         std::vector<LabelEntry> entries,
                         std::vector<std::string> label_names)
    : n_rows_(n_rows), n_labels_(n_labels) {
  for (const auto& e : entries) {
    if (e.row >= n_rows || e.col >= n_labels) {
      throw IndexError("LabelMatrix: entry (" + std::to_string(e.row) + ", " +
                       std::to_string(e.col) + ") out of bounds for " +
                       shape_of(n_rows, n_labels));
    }
    if (!std::isfinite(e.value)) throw ValueError("LabelMatrix: non-finite entry");
    if (e.value < 0.0) {
      throw ValueError("LabelMatrix: negative entry at (" + std::to_string(e.row) + ", " +
                       std::to_string(e.col) + ")");
    }
  }
  // Explicit zeros carry no information; dropping them keeps dense round trips exact.
  std::erase_if(entries, [](const LabelEntry& e) { return e.value == 0.0; });
  std::sort(entries.begin(), entries.end(), [](const LabelEntry& a, const LabelEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw ValueError("LabelMatrix: duplicate entry (" + std::to_string(entries[i].row) +
                       ", " + std::to_string(entries[i].col) + ")");
    }
  }
  row_ptr_.assign(n_rows + 1, 0);
  cols_.reserve(entries.size());
  values_.reserve(entries.size());
  for (const auto& e : entries) {
    ++row_ptr_[e.row + 1];
    cols_.push_back(e.col);
    values_.push_back(e.value);
  }
  for (std::size_t r = 0; r < n_rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
  set_label_names(std::move(label_names));
}

std::vector<LabelEntry> LabelMatrix::entries() const {
  std::vector<LabelEntry> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.push_back({r, cols_[k], values_[k]});
  return out;
}

void LabelMatrix::set_label_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != n_labels_) {
    throw ShapeError("LabelMatrix: " + std::to_string(names.size()) +
                     " label names for " + std::to_string(n_labels_) + " labels");
  }
  names_ = std::move(names);
}

LabelMatrix LabelMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<LabelEntry> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n_rows_) throw IndexError("select_rows: row index out of range");
    auto cols = row_cols(rows[i]);
    auto vals = row_values(rows[i]);
    for (std::size_t k = 0; k < cols.size(); ++k) out.push_back({i, cols[k], vals[k]});
  }
  return LabelMatrix(rows.size(), n_labels_, std::move(out), names_);
}

DenseMatrix LabelMatrix::times(const DenseMatrix& b) const {
  if (b.rows() != n_labels_) {
    throw ShapeError("LabelMatrix::times: shape mismatch " + shape_of(n_rows_, n_labels_) +
                     " * " + b.shape_string());
  }
  DenseMatrix out(n_rows_, b.cols());
  parallel_for_rows(n_rows_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto dst = out.row(r);
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        const double v = values_[k];
        auto src = b.row(cols_[k]);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
      }
    }
  });
  return out;
}

DenseMatrix LabelMatrix::transpose_times(const DenseMatrix& a) const {
  if (a.rows() != n_rows_) {
    throw ShapeError("LabelMatrix::transpose_times: shape mismatch " +
                     shape_of(n_labels_, n_rows_) + " * " + a.shape_string());
  }
  // Sequential scatter over rows: each output entry accumulates in row order.
  DenseMatrix out(n_labels_, a.cols());
  for (std::size_t r = 0; r < n_rows_; ++r) {
    auto src = a.row(r);
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double v = values_[k];
      auto dst = out.row(cols_[k]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

double LabelMatrix::frobenius_norm_sq() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double LabelMatrix::mean_value() const {
  if (n_rows_ == 0 || n_labels_ == 0) return 0.0;
  double s = 0.0;
  for (double v : values_) s += v;
  return s / (static_cast<double>(n_rows_) * static_cast<double>(n_labels_));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shape mismatch " + a.shape_string() + " * " +
                     b.shape_string());
  }
  DenseMatrix c(a.rows(), b.cols());
  parallel_for_rows(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto dst = c.row(i);
      auto lhs = a.row(i);
      for (std::size_t k = 0; k < lhs.size(); ++k) {
        const double aik = lhs[k];
        if (aik == 0.0) continue;
        auto src = b.row(k);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
      }
    }
  });
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: shape mismatch " + a.shape_string() + "^T * " +
                     b.shape_string());
  }
  return matmul(a.transpose(), b);
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: shape mismatch " + a.shape_string() + " * " +
                     b.shape_string() + "^T");
  }
  DenseMatrix c(a.rows(), b.rows());
  parallel_for_rows(a.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto lhs = a.row(i);
      for (std::size_t j = 0; j < b.rows(); ++j) {
        auto rhs = b.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < lhs.size(); ++k) s += lhs[k] * rhs[k];
        c(i, j) = s;
      }
    }
  });
  return c;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix out = a;
  auto dst = out.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  DenseMatrix out = a;
  auto dst = out.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return out;
}

DenseMatrix scale(const DenseMatrix& a, double factor) {
  DenseMatrix out = a;
  for (double& v : out.values()) v *= factor;
  return out;
}

double frobenius_norm_sq(const DenseMatrix& a) {
  return deterministic_row_sum(a.rows(), [&](std::size_t i) {
    double s = 0.0;
    for (double v : a.row(i)) s += v * v;
    return s;
  });
}

double frobenius_norm(const DenseMatrix& a) { return std::sqrt(frobenius_norm_sq(a)); }

DenseMatrix project_nonneg(const DenseMatrix& a) {
  DenseMatrix out = a;
  project_nonneg_inplace(out);
  return out;
}

void project_nonneg_inplace(DenseMatrix& a) {
  // Writes +0.0 for every clamped entry, including -0.0.
  for (double& v : a.values())
    if (!(v > 0.0)) v = 0.0;
}

DenseMatrix sparse_to_dense(const LabelMatrix& v) {
  DenseMatrix out(v.n_rows(), v.n_labels());
  for (std::size_t r = 0; r < v.n_rows(); ++r) {
    auto cols = v.row_cols(r);
    auto vals = v.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out(r, cols[k]) = vals[k];
  }
  return out;
}

LabelMatrix dense_to_sparse(const DenseMatrix& a, double tol) {
  if (!(tol >= 0.0)) throw ConfigError("dense_to_sparse: tol must be >= 0");
  std::vector<LabelEntry> entries;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double v = a(r, c);
      if (v < -tol) {
        throw ValueError("dense_to_sparse: entry (" + std::to_string(r) + ", " +
                         std::to_string(c) + ") = " + std::to_string(v) +
                         " violates non-negativity");
      }
      if (std::abs(v) <= tol) continue;
      entries.push_back({r, c, v});
    }
  }
  return LabelMatrix(a.rows(), a.cols(), std::move(entries));
}

}  // namespace nnxml
