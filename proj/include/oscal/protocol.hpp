#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscal/matrix.hpp"
#include "oscal/metrics.hpp"

namespace oscal {

struct SplitSpec {
  std::int64_t num_total_classes = 10;
  std::int64_t num_known = 6;
  std::uint64_t seed = 0;
  std::int64_t run_index = 0;
};

/// One run's known/unknown class partition. known_class_ids are ascending and
/// map to compact ids 0..K-1 in that order; every other original id maps to K.
struct RunManifest {
  std::uint64_t seed = 0;
  std::int64_t run_index = 0;
  std::int64_t num_total_classes = 0;
  std::vector<std::int64_t> known_class_ids;
  std::vector<std::int64_t> class_remap;  // indexed by original id
  std::string dataset_name;

  std::int64_t num_known() const { return static_cast<std::int64_t>(known_class_ids.size()); }
};

/// Draws K known classes without replacement from the SplitMix64 stream for
/// (seed, run_index). Pure function of the spec.
RunManifest generate_split(const SplitSpec& spec, std::string dataset_name = "synthetic");

/// Applies the manifest's remap; throws DataError on an out-of-range raw
/// label, citing the row.
LabelVector remap_labels(std::span<const std::int64_t> raw_labels,
                         const RunManifest& manifest);

struct AggregateStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

struct AggregateReport {
  std::string method;
  bool calibrated = false;
  std::int64_t runs = 0;
  AggregateStat brier;
  AggregateStat ece;
  AggregateStat accuracy;
  std::optional<AggregateStat> temperature;  // present when every run carries one
};

/// Mean and sample std per metric over runs of one method/calibration
/// condition. Values are summed in sorted order, so the aggregate is exactly
/// independent of report order. Mixed methods or calibration flags throw.
AggregateReport aggregate_runs(const std::vector<MetricReport>& reports);

}  // namespace oscal
