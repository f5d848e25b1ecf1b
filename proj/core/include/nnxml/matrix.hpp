#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nnxml {

/// Dense row-major matrix of finite doubles. Holds factor matrices, latent
/// codes and feature blocks.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws ShapeError if values.size() != rows * cols and ValueError on a
  /// non-finite entry.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  DenseMatrix transpose() const;
  DenseMatrix select_rows(std::span<const std::size_t> rows) const;
  std::vector<double> column(std::size_t c) const;

  double min_value() const;
  double max_value() const;
  bool all_finite() const;

  std::string shape_string() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct LabelEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

/// Sparse non-negative n x p instance-by-label matrix stored as CSR.
///
/// Invariants checked at construction: entries are finite and >= 0,
/// (row, col) pairs are unique and in bounds, and label_names is either
/// empty or has exactly n_labels entries. Explicit zeros are dropped.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t n_rows, std::size_t n_labels, std::vector<LabelEntry> entries,
              std::vector<std::string> label_names = {});

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_labels() const noexcept { return n_labels_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  /// Entries in row-major order, columns ascending within a row.
  std::vector<LabelEntry> entries() const;
  const std::vector<std::string>& label_names() const noexcept { return names_; }
  bool has_label_names() const noexcept { return !names_.empty(); }
  void set_label_names(std::vector<std::string> names);

  LabelMatrix select_rows(std::span<const std::size_t> rows) const;

  /// this * b for b of shape n_labels x k.
  DenseMatrix times(const DenseMatrix& b) const;
  /// this^T * a for a of shape n_rows x k; result is n_labels x k.
  DenseMatrix transpose_times(const DenseMatrix& a) const;

  double frobenius_norm_sq() const;
  double mean_value() const;

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_labels_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

// Kernels. Every kernel is a pure function. Products accumulate each output
// entry over the inner index in ascending order; parallel execution splits
// output rows only, so results are bitwise independent of the thread count.

/// a * b. Throws ShapeError naming both shapes when a.cols() != b.rows().
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a^T * b.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a * b^T.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double factor);

double frobenius_norm_sq(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);

/// Entrywise max(value, 0).
DenseMatrix project_nonneg(const DenseMatrix& a);
void project_nonneg_inplace(DenseMatrix& a);

DenseMatrix sparse_to_dense(const LabelMatrix& v);
/// Drops entries with |value| <= tol and clamps the remaining values in
/// [-tol, 0) to zero. Throws ValueError for any entry < -tol.
LabelMatrix dense_to_sparse(const DenseMatrix& a, double tol);

}  // namespace nnxml
