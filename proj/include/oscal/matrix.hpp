#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace oscal {

/// Dense row-major float64 matrix. All arithmetic in the toolkit is 64-bit;
/// narrower on-disk types are widened on load.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool all_finite() const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Pre-softmax scores, one row per sample, one column per known class.
using LogitMatrix = Matrix;

/// Throws InvalidArgument unless the matrix has >= 1 row, >= 2 columns and
/// only finite entries. Applied at I/O boundaries; in-process callers may
/// build smaller matrices (e.g. an empty prediction batch).
void validate_logits(const Matrix& m, const char* what = "logits");

enum class ProbMode {
  RowStochastic,  // every row sums to 1 within 1e-9
  RowSubnormal,   // entries in [0,1]; row sums unconstrained (OSR-extended rows exceed 1)
};

/// Row-wise probabilities with an explicit normalization mode. Construction
/// validates the mode's invariants, so a ProbMatrix in hand is always valid.
class ProbMatrix {
public:
  ProbMatrix(Matrix values, ProbMode mode);

  const Matrix& values() const noexcept { return values_; }
  ProbMode mode() const noexcept { return mode_; }

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }

private:
  Matrix values_;
  ProbMode mode_;
};

/// Integer class labels in [0, num_known]; the value num_known is the
/// reserved unknown index and is only legal when allow_unknown is set.
class LabelVector {
public:
  LabelVector(std::vector<std::int64_t> labels, std::int64_t num_known,
              bool allow_unknown);

  std::size_t size() const noexcept { return labels_.size(); }
  std::int64_t operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<std::int64_t>& labels() const noexcept { return labels_; }
  std::int64_t num_known() const noexcept { return num_known_; }
  std::int64_t unknown_index() const noexcept { return num_known_; }
  bool has_unknown() const;

private:
  std::vector<std::int64_t> labels_;
  std::int64_t num_known_;
};

}  // namespace oscal
