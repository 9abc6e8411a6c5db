#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscal/matrix.hpp"

namespace oscal {

struct ReliabilityBin {
  double lo;   // exclusive
  double hi;   // inclusive
  std::int64_t count;
  double avg_conf;  // 0 for an empty bin
  double accuracy;  // 0 for an empty bin
};

/// Equal-width partition of (0,1] into M confidence bins.
struct ReliabilityTable {
  std::vector<ReliabilityBin> bins;
  std::int64_t total_count() const;
};

struct EceResult {
  double ece;
  ReliabilityTable table;
};

/// Expected calibration error with M equal-width bins over (0,1]. Confidence
/// is the per-row max probability; a sample with confidence c lands in bin
/// ceil(c*M) (c = 0 goes to bin 1). Correctness compares the row argmax with
/// the label; the overload takes externally decided predictions instead (the
/// open-set methods predict with a rule other than plain argmax).
EceResult ece(const ProbMatrix& probs, const LabelVector& labels, int num_bins = 15);
EceResult ece_with_predictions(const ProbMatrix& probs, const LabelVector& predictions,
                               const LabelVector& labels, int num_bins = 15);

/// Closed-set Brier score: mean over rows of ||p - onehot(y)||^2, in [0, 2].
/// Requires a row-stochastic matrix and known-only labels.
double brier_closed(const ProbMatrix& probs, const LabelVector& labels);

/// prod_i (1 - p_i): the chance that no known class fires.
double unknown_probability(std::span<const double> prob_row);

/// Appends the unknown-probability column: N-by-K in, N-by-(K+1) out. With
/// renormalize the rows are rescaled to sum to 1; by default the literal
/// product-augmented rows are kept (row sums then exceed 1).
ProbMatrix extend_osr(const ProbMatrix& probs, bool renormalize = false);

enum class BrierColumns {
  AllKPlusOne,  // penalize the unknown column too (default)
  FirstKOnly,   // literal K-column sum, for strict reproduction
};

/// Open-set Brier score over the (K+1)-column matrix; unknown samples are
/// one-hot at column K. Reported unclamped.
double brier_osr(const ProbMatrix& probs_osr, const LabelVector& labels,
                 BrierColumns cols = BrierColumns::AllKPlusOne);

/// Fraction of rows whose argmax equals the label. An unknown label (index K)
/// can never match a K-column argmax and counts as wrong.
double accuracy_closed(const ProbMatrix& probs, const LabelVector& labels);

/// Fraction of exact label matches, unknowns included as their own class.
double accuracy_osr(const LabelVector& predicted, const LabelVector& truth);

/// One method-by-calibration cell group: the scores plus the reliability
/// table they were binned from. Serialized as canonical JSON (see json_io).
struct MetricReport {
  std::string method;  // closed-set | open-set-threshold | open-set-openmax
  bool calibrated = false;
  double brier = 0.0;
  double ece = 0.0;
  double accuracy = 0.0;
  std::optional<double> temperature;  // absent for uncalibrated reports
  ReliabilityTable bins;
};

}  // namespace oscal
