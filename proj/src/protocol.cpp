#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "oscal/error.hpp"
#include "oscal/protocol.hpp"
#include "oscal/rng.hpp"

namespace oscal {
namespace {

// Order-independent mean/std: summing sorted values makes the aggregate
// bitwise identical under any permutation of the reports.
AggregateStat stat_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

RunManifest generate_split(const SplitSpec& spec, std::string dataset_name) {
  if (spec.num_total_classes < 2)
    throw InvalidArgument("generate_split: need at least 2 classes");
  if (spec.num_known < 1 || spec.num_known >= spec.num_total_classes)
    throw InvalidArgument("generate_split: need 1 <= num_known < num_total_classes");
  if (spec.run_index < 0)
    throw InvalidArgument("generate_split: run_index must be >= 0");

  SplitMix64 rng =
      SplitMix64::for_run(spec.seed, static_cast<std::uint64_t>(spec.run_index));

  // Partial Fisher-Yates: the first K entries are the known classes.
  std::vector<std::int64_t> ids(static_cast<std::size_t>(spec.num_total_classes));
  std::iota(ids.begin(), ids.end(), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.num_known); ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }

  RunManifest m;
  m.seed = spec.seed;
  m.run_index = spec.run_index;
  m.num_total_classes = spec.num_total_classes;
  m.dataset_name = std::move(dataset_name);
  m.known_class_ids.assign(ids.begin(), ids.begin() + spec.num_known);
  std::sort(m.known_class_ids.begin(), m.known_class_ids.end());

  m.class_remap.assign(static_cast<std::size_t>(spec.num_total_classes),
                       spec.num_known);
  for (std::size_t rank = 0; rank < m.known_class_ids.size(); ++rank)
    m.class_remap[static_cast<std::size_t>(m.known_class_ids[rank])] =
        static_cast<std::int64_t>(rank);
  return m;
}

LabelVector remap_labels(std::span<const std::int64_t> raw_labels,
                         const RunManifest& manifest) {
  std::vector<std::int64_t> out(raw_labels.size());
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    const std::int64_t raw = raw_labels[i];
    if (raw < 0 || raw >= manifest.num_total_classes)
      throw DataError("raw label " + std::to_string(raw) + " out of range [0," +
                      std::to_string(manifest.num_total_classes) + ") at row " +
                      std::to_string(i));
    out[i] = manifest.class_remap[static_cast<std::size_t>(raw)];
  }
  return LabelVector(std::move(out), manifest.num_known(), true);
}

AggregateReport aggregate_runs(const std::vector<MetricReport>& reports) {
  if (reports.empty())
    throw InvalidArgument("aggregate_runs: need at least one report");
  for (const auto& r : reports)
    if (r.method != reports.front().method || r.calibrated != reports.front().calibrated)
      throw InvalidArgument("aggregate_runs: reports mix methods or calibration flags");

  AggregateReport agg;
  agg.method = reports.front().method;
  agg.calibrated = reports.front().calibrated;
  agg.runs = static_cast<std::int64_t>(reports.size());

  std::vector<double> brier, ece, accuracy, temperature;
  bool all_have_temperature = true;
  for (const auto& r : reports) {
    brier.push_back(r.brier);
    ece.push_back(r.ece);
    accuracy.push_back(r.accuracy);
    if (r.temperature)
      temperature.push_back(*r.temperature);
    else
      all_have_temperature = false;
  }
  agg.brier = stat_of(std::move(brier));
  agg.ece = stat_of(std::move(ece));
  agg.accuracy = stat_of(std::move(accuracy));
  if (all_have_temperature) agg.temperature = stat_of(std::move(temperature));
  return agg;
}

}  // namespace oscal
