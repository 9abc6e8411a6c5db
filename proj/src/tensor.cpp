#include <cmath>

#include "oscal/error.hpp"
#include "oscal/kernels.hpp"
#include "oscal/tensor.hpp"

namespace oscal {

ArgMax argmax_row(std::span<const double> row) {
  if (row.empty()) throw InvalidArgument("argmax_row: empty row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = i;
  return {best, row[best]};
}

double logsumexp(std::span<const double> row) {
  if (row.empty()) throw InvalidArgument("logsumexp: empty row");
  const auto& k = kernels::active();
  const double m = k.reduce_max(row.data(), row.size());
  return m + std::log(k.exp_shift_scale_sum(row.data(), row.size(), m, 1.0));
}

void softmax_row(std::span<const double> in, std::span<double> out,
                 double temperature) {
  const auto& k = kernels::active();
  const double m = k.reduce_max(in.data(), in.size());
  const double s = k.exp_shift_scale_store(out.data(), in.data(), in.size(), m,
                                           1.0 / temperature);
  k.scale_inplace(out.data(), out.size(), 1.0 / s);
}

ProbMatrix softmax(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("softmax: temperature must be a positive finite real");
  if (logits.rows() > 0 && logits.cols() == 0)
    throw InvalidArgument("softmax: rows must have at least one column");
  if (!logits.all_finite())
    throw InvalidArgument("softmax: logits contain non-finite entries");

  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i)
    softmax_row(logits.row(i), out.row(i), temperature);
  return ProbMatrix(std::move(out), ProbMode::RowStochastic);
}

}  // namespace oscal
