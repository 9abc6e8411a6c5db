#pragma once

#include <filesystem>
#include <string>

#include "oscal/calibration.hpp"
#include "oscal/metrics.hpp"
#include "oscal/openset.hpp"
#include "oscal/protocol.hpp"

namespace oscal {

// Canonical JSON: keys sorted, two-space indent, UTF-8, floats with 17
// significant digits (round-trips every double). Equal values serialize to
// identical bytes. Parsers validate the documented schemas strictly and
// throw DataError on any deviation.

std::string format_json_double(double v);

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
void save_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

std::string report_to_json(const MetricReport& r);
MetricReport report_from_json(const std::string& text);
void save_report(const MetricReport& r, const std::filesystem::path& path);
MetricReport load_report(const std::filesystem::path& path);

std::string aggregate_to_json(const AggregateReport& a);
void save_aggregate(const AggregateReport& a, const std::filesystem::path& path);

std::string fit_to_json(const TemperatureFit& f);
TemperatureFit fit_from_json(const std::string& text);
void save_fit(const TemperatureFit& f, const std::filesystem::path& path);
TemperatureFit load_fit(const std::filesystem::path& path);

std::string openmax_to_json(const OpenMaxModel& m);
OpenMaxModel openmax_from_json(const std::string& text);
void save_openmax(const OpenMaxModel& m, const std::filesystem::path& path);
OpenMaxModel load_openmax(const std::filesystem::path& path);

}  // namespace oscal
