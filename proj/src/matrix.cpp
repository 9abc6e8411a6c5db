#include <cmath>
#include <string>

#include "oscal/error.hpp"
#include "oscal/kernels.hpp"
#include "oscal/matrix.hpp"

namespace oscal {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != m.cols_)
      throw InvalidArgument("Matrix::from_rows: ragged initializer");
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void validate_logits(const Matrix& m, const char* what) {
  if (m.rows() < 1)
    throw InvalidArgument(std::string(what) + ": need at least one row");
  if (m.cols() < 2)
    throw InvalidArgument(std::string(what) + ": need at least two classes, got " +
                          std::to_string(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j)))
        throw InvalidArgument(std::string(what) + ": non-finite entry at row " +
                              std::to_string(i) + ", col " + std::to_string(j));
}

ProbMatrix::ProbMatrix(Matrix values, ProbMode mode)
    : values_(std::move(values)), mode_(mode) {
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    const auto r = values_.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double v = r[j];
      if (!(v >= 0.0 && v <= 1.0))
        throw InvalidArgument("ProbMatrix: entry " + std::to_string(v) +
                              " outside [0,1] at row " + std::to_string(i) +
                              ", col " + std::to_string(j));
    }
    if (mode_ == ProbMode::RowStochastic) {
      const double s = k.reduce_sum(r.data(), r.size());
      if (std::abs(s - 1.0) > 1e-9)
        throw InvalidArgument("ProbMatrix: row " + std::to_string(i) +
                              " sums to " + std::to_string(s) +
                              ", expected 1 within 1e-9");
    }
  }
}

LabelVector::LabelVector(std::vector<std::int64_t> labels, std::int64_t num_known,
                         bool allow_unknown)
    : labels_(std::move(labels)), num_known_(num_known) {
  if (num_known_ < 1)
    throw InvalidArgument("LabelVector: num_known must be >= 1");
  const std::int64_t hi = allow_unknown ? num_known_ : num_known_ - 1;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] > hi)
      throw DataError("label " + std::to_string(labels_[i]) +
                      " out of range [0," + std::to_string(hi) + "] at row " +
                      std::to_string(i));
  }
}

bool LabelVector::has_unknown() const {
  for (std::int64_t v : labels_)
    if (v == num_known_) return true;
  return false;
}

}  // namespace oscal
