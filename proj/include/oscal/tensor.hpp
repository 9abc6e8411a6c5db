#pragma once

#include <cstddef>
#include <span>

#include "oscal/matrix.hpp"

namespace oscal {

struct ArgMax {
  std::size_t index;
  double value;
};

/// First index attaining the row maximum (ties break to the lowest index).
/// Throws InvalidArgument on an empty row.
ArgMax argmax_row(std::span<const double> row);

/// log(sum(exp(row))) with max subtraction; stable for entries up to ~1e300.
/// Throws InvalidArgument on an empty row.
double logsumexp(std::span<const double> row);

/// Row-wise tempered softmax: exp((z - max)/T), normalized. Preserves each
/// row's argmax for any T > 0. Throws InvalidArgument for a non-positive or
/// non-finite temperature or non-finite logits.
ProbMatrix softmax(const Matrix& logits, double temperature);

/// Single-row form writing into out (out.size() == in.size()).
void softmax_row(std::span<const double> in, std::span<double> out,
                 double temperature);

}  // namespace oscal
