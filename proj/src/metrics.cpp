#include <cmath>
#include <string>

#include "oscal/error.hpp"
#include "oscal/kernels.hpp"
#include "oscal/metrics.hpp"
#include "oscal/tensor.hpp"

namespace oscal {
namespace {

void check_lengths(std::size_t rows, const LabelVector& labels, const char* what) {
  if (rows != labels.size())
    throw InvalidArgument(std::string(what) + ": " + std::to_string(rows) +
                          " rows vs " + std::to_string(labels.size()) + " labels");
}

int bin_of(double confidence, int num_bins) {
  int b = static_cast<int>(std::ceil(confidence * num_bins));
  if (b < 1) b = 1;  // confidence 0 belongs to the first bin
  if (b > num_bins) b = num_bins;
  return b;
}

EceResult ece_impl(const ProbMatrix& probs, const std::vector<std::int64_t>& predicted,
                   const LabelVector& labels, int num_bins) {
  const std::size_t n = probs.rows();
  std::vector<std::int64_t> count(static_cast<std::size_t>(num_bins), 0);
  std::vector<double> conf_sum(static_cast<std::size_t>(num_bins), 0.0);
  std::vector<std::int64_t> correct(static_cast<std::size_t>(num_bins), 0);

  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = probs.row(i);
    const double conf = k.reduce_max(row.data(), row.size());
    const std::size_t b = static_cast<std::size_t>(bin_of(conf, num_bins) - 1);
    count[b] += 1;
    conf_sum[b] += conf;
    correct[b] += predicted[i] == labels[i] ? 1 : 0;
  }

  ReliabilityTable table;
  table.bins.reserve(static_cast<std::size_t>(num_bins));
  double ece_val = 0.0;
  for (int m = 0; m < num_bins; ++m) {
    ReliabilityBin bin;
    bin.lo = static_cast<double>(m) / num_bins;
    bin.hi = static_cast<double>(m + 1) / num_bins;
    bin.count = count[static_cast<std::size_t>(m)];
    if (bin.count > 0) {
      bin.avg_conf = conf_sum[static_cast<std::size_t>(m)] / static_cast<double>(bin.count);
      bin.accuracy =
          static_cast<double>(correct[static_cast<std::size_t>(m)]) / static_cast<double>(bin.count);
      ece_val += static_cast<double>(bin.count) / static_cast<double>(n) *
                 std::abs(bin.accuracy - bin.avg_conf);
    } else {
      bin.avg_conf = 0.0;
      bin.accuracy = 0.0;
    }
    table.bins.push_back(bin);
  }
  return {ece_val, std::move(table)};
}

}  // namespace

std::int64_t ReliabilityTable::total_count() const {
  std::int64_t n = 0;
  for (const auto& b : bins) n += b.count;
  return n;
}

EceResult ece(const ProbMatrix& probs, const LabelVector& labels, int num_bins) {
  if (num_bins < 1) throw InvalidArgument("ece: num_bins must be >= 1");
  if (probs.rows() == 0) throw InvalidArgument("ece: empty input");
  check_lengths(probs.rows(), labels, "ece");
  std::vector<std::int64_t> predicted(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i)
    predicted[i] = static_cast<std::int64_t>(argmax_row(probs.row(i)).index);
  return ece_impl(probs, predicted, labels, num_bins);
}

EceResult ece_with_predictions(const ProbMatrix& probs, const LabelVector& predictions,
                               const LabelVector& labels, int num_bins) {
  if (num_bins < 1) throw InvalidArgument("ece: num_bins must be >= 1");
  if (probs.rows() == 0) throw InvalidArgument("ece: empty input");
  check_lengths(probs.rows(), labels, "ece");
  check_lengths(probs.rows(), predictions, "ece(predictions)");
  return ece_impl(probs, predictions.labels(), labels, num_bins);
}

double brier_closed(const ProbMatrix& probs, const LabelVector& labels) {
  if (probs.mode() != ProbMode::RowStochastic)
    throw InvalidArgument("brier_closed: needs a row-stochastic matrix");
  if (probs.rows() == 0) throw InvalidArgument("brier_closed: empty input");
  check_lengths(probs.rows(), labels, "brier_closed");
  if (static_cast<std::int64_t>(probs.cols()) != labels.num_known())
    throw InvalidArgument("brier_closed: column count must equal num_known");

  const auto& k = kernels::active();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    if (labels[i] == labels.unknown_index())
      throw InvalidArgument("brier_closed: unknown label at row " + std::to_string(i));
    const auto row = probs.row(i);
    // sum_j (p_j - [j==y])^2 = sum_j p_j^2 - 2 p_y + 1
    acc += k.sum_sq(row.data(), row.size()) -
           2.0 * row[static_cast<std::size_t>(labels[i])] + 1.0;
  }
  return acc / static_cast<double>(probs.rows());
}

double unknown_probability(std::span<const double> prob_row) {
  for (std::size_t i = 0; i < prob_row.size(); ++i)
    if (!(prob_row[i] >= 0.0 && prob_row[i] <= 1.0))
      throw InvalidArgument("unknown_probability: entry " + std::to_string(prob_row[i]) +
                            " outside [0,1] at index " + std::to_string(i));
  return kernels::active().prod_one_minus(prob_row.data(), prob_row.size());
}

ProbMatrix extend_osr(const ProbMatrix& probs, bool renormalize) {
  const std::size_t n = probs.rows();
  const std::size_t cols = probs.cols();
  Matrix out(n, cols + 1);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = probs.row(i);
    const auto dst = out.row(i);
    for (std::size_t j = 0; j < cols; ++j) dst[j] = src[j];
    dst[cols] = k.prod_one_minus(src.data(), src.size());
    if (renormalize) {
      const double s = k.reduce_sum(dst.data(), dst.size());
      k.scale_inplace(dst.data(), dst.size(), 1.0 / s);  // s >= unknown > 0 or a known is 1
    }
  }
  return ProbMatrix(std::move(out),
                    renormalize ? ProbMode::RowStochastic : ProbMode::RowSubnormal);
}

double brier_osr(const ProbMatrix& probs_osr, const LabelVector& labels,
                 BrierColumns cols) {
  if (probs_osr.rows() == 0) throw InvalidArgument("brier_osr: empty input");
  check_lengths(probs_osr.rows(), labels, "brier_osr");
  if (static_cast<std::int64_t>(probs_osr.cols()) != labels.num_known() + 1)
    throw InvalidArgument("brier_osr: expected " + std::to_string(labels.num_known() + 1) +
                          " columns, got " + std::to_string(probs_osr.cols()));

  const auto& k = kernels::active();
  const std::size_t num_known = static_cast<std::size_t>(labels.num_known());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_osr.rows(); ++i) {
    const auto row = probs_osr.row(i);
    const std::size_t y = static_cast<std::size_t>(labels[i]);
    const std::size_t span = cols == BrierColumns::AllKPlusOne ? row.size() : num_known;
    double s = k.sum_sq(row.data(), span);
    if (y < span) s += 1.0 - 2.0 * row[y];
    acc += s;
  }
  return acc / static_cast<double>(probs_osr.rows());
}

double accuracy_closed(const ProbMatrix& probs, const LabelVector& labels) {
  if (probs.rows() == 0) throw InvalidArgument("accuracy_closed: empty input");
  check_lengths(probs.rows(), labels, "accuracy_closed");
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < probs.rows(); ++i)
    hits += static_cast<std::int64_t>(argmax_row(probs.row(i)).index) == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(probs.rows());
}

double accuracy_osr(const LabelVector& predicted, const LabelVector& truth) {
  if (predicted.size() != truth.size())
    throw InvalidArgument("accuracy_osr: length mismatch (" +
                          std::to_string(predicted.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  if (predicted.size() == 0) throw InvalidArgument("accuracy_osr: empty input");
  if (predicted.num_known() != truth.num_known())
    throw InvalidArgument("accuracy_osr: num_known mismatch");
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace oscal
