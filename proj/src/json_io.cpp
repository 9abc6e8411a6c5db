#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oscal/error.hpp"
#include "oscal/json_io.hpp"

namespace oscal {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << data;
  if (!out) throw DataError("write failed: " + path.string());
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw DataError(std::string(what) + ": malformed JSON");
  return j;
}

void require_keys(const json& j, std::initializer_list<const char*> keys,
                  const char* what) {
  if (!j.is_object()) throw DataError(std::string(what) + ": expected a JSON object");
  std::set<std::string> expected(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!expected.count(k))
      throw DataError(std::string(what) + ": unexpected key '" + k + "'");
  }
  for (const auto& k : expected)
    if (!j.contains(k))
      throw DataError(std::string(what) + ": missing key '" + k + "'");
}

double get_finite(const json& j, const char* key, const char* what) {
  if (!j.at(key).is_number())
    throw DataError(std::string(what) + ": '" + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v))
    throw DataError(std::string(what) + ": '" + key + "' is not finite");
  return v;
}

// Minimal deterministic writer; everything we serialize is built from these.
std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

}  // namespace

std::string format_json_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- manifest

std::string manifest_to_json(const RunManifest& m) {
  std::string out = "{\n  \"class_remap\": [";
  for (std::size_t i = 0; i < m.class_remap.size(); ++i)
    out += (i ? ", " : "") + std::to_string(m.class_remap[i]);
  out += "],\n  \"dataset_name\": " + jstr(m.dataset_name) +
         ",\n  \"known_class_ids\": [";
  for (std::size_t i = 0; i < m.known_class_ids.size(); ++i)
    out += (i ? ", " : "") + std::to_string(m.known_class_ids[i]);
  out += "],\n  \"num_total_classes\": " + std::to_string(m.num_total_classes) +
         ",\n  \"run_index\": " + std::to_string(m.run_index) +
         ",\n  \"seed\": " + std::to_string(m.seed) + "\n}\n";
  return out;
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = parse(text, "manifest");
  require_keys(j,
               {"class_remap", "dataset_name", "known_class_ids",
                "num_total_classes", "run_index", "seed"},
               "manifest");
  RunManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.run_index = j.at("run_index").get<std::int64_t>();
  m.num_total_classes = j.at("num_total_classes").get<std::int64_t>();
  m.dataset_name = j.at("dataset_name").get<std::string>();
  m.known_class_ids = j.at("known_class_ids").get<std::vector<std::int64_t>>();
  m.class_remap = j.at("class_remap").get<std::vector<std::int64_t>>();

  if (m.num_total_classes < 2 ||
      std::ssize(m.class_remap) != m.num_total_classes)
    throw DataError("manifest: class_remap must list every original class");
  const std::int64_t k = m.num_known();
  if (k < 1 || k >= m.num_total_classes)
    throw DataError("manifest: known_class_ids size out of range");
  std::set<std::int64_t> seen;
  for (std::size_t rank = 0; rank < m.known_class_ids.size(); ++rank) {
    const std::int64_t id = m.known_class_ids[rank];
    if (id < 0 || id >= m.num_total_classes || !seen.insert(id).second)
      throw DataError("manifest: known_class_ids must be distinct ids below "
                      "num_total_classes");
    if (rank > 0 && m.known_class_ids[rank - 1] >= id)
      throw DataError("manifest: known_class_ids must be ascending");
    if (m.class_remap[static_cast<std::size_t>(id)] != static_cast<std::int64_t>(rank))
      throw DataError("manifest: class_remap disagrees with known_class_ids");
  }
  for (std::int64_t orig = 0; orig < m.num_total_classes; ++orig)
    if (!seen.count(orig) && m.class_remap[static_cast<std::size_t>(orig)] != k)
      throw DataError("manifest: unknown class " + std::to_string(orig) +
                      " must remap to " + std::to_string(k));
  return m;
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_file(path, manifest_to_json(m));
}

RunManifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// ------------------------------------------------------------------ report

std::string report_to_json(const MetricReport& r) {
  std::string out = "{\n  \"accuracy\": " + format_json_double(r.accuracy) +
                    ",\n  \"bins\": [";
  for (std::size_t i = 0; i < r.bins.bins.size(); ++i) {
    const auto& b = r.bins.bins[i];
    out += (i ? ",\n    " : "\n    ");
    out += "{\"accuracy\": " + format_json_double(b.accuracy) +
           ", \"avg_conf\": " + format_json_double(b.avg_conf) +
           ", \"count\": " + std::to_string(b.count) +
           ", \"hi\": " + format_json_double(b.hi) +
           ", \"lo\": " + format_json_double(b.lo) + "}";
  }
  out += r.bins.bins.empty() ? "]" : "\n  ]";
  out += ",\n  \"brier\": " + format_json_double(r.brier) +
         ",\n  \"calibrated\": " + (r.calibrated ? "true" : "false") +
         ",\n  \"ece\": " + format_json_double(r.ece) +
         ",\n  \"method\": " + jstr(r.method) + ",\n  \"temperature\": " +
         (r.temperature ? format_json_double(*r.temperature) : "null") + "\n}\n";
  return out;
}

MetricReport report_from_json(const std::string& text) {
  const json j = parse(text, "report");
  require_keys(j, {"accuracy", "bins", "brier", "calibrated", "ece", "method",
                   "temperature"},
               "report");
  MetricReport r;
  r.method = j.at("method").get<std::string>();
  if (r.method != "closed-set" && r.method != "open-set-threshold" &&
      r.method != "open-set-openmax")
    throw DataError("report: unknown method '" + r.method + "'");
  if (!j.at("calibrated").is_boolean())
    throw DataError("report: 'calibrated' must be a boolean");
  r.calibrated = j.at("calibrated").get<bool>();
  r.brier = get_finite(j, "brier", "report");
  r.ece = get_finite(j, "ece", "report");
  r.accuracy = get_finite(j, "accuracy", "report");
  if (r.ece < 0.0 || r.ece > 1.0) throw DataError("report: ece outside [0,1]");
  if (r.accuracy < 0.0 || r.accuracy > 1.0)
    throw DataError("report: accuracy outside [0,1]");
  if (r.brier < 0.0) throw DataError("report: negative brier");
  if (j.at("temperature").is_null()) {
    r.temperature = std::nullopt;
  } else {
    const double t = get_finite(j, "temperature", "report");
    if (!(t > 0.0)) throw DataError("report: temperature must be positive");
    r.temperature = t;
  }
  if (!j.at("bins").is_array()) throw DataError("report: 'bins' must be an array");
  for (const auto& jb : j.at("bins")) {
    require_keys(jb, {"accuracy", "avg_conf", "count", "hi", "lo"}, "report bin");
    ReliabilityBin b;
    b.lo = get_finite(jb, "lo", "report bin");
    b.hi = get_finite(jb, "hi", "report bin");
    b.count = jb.at("count").get<std::int64_t>();
    b.avg_conf = get_finite(jb, "avg_conf", "report bin");
    b.accuracy = get_finite(jb, "accuracy", "report bin");
    if (b.count < 0) throw DataError("report bin: negative count");
    r.bins.bins.push_back(b);
  }
  return r;
}

void save_report(const MetricReport& r, const std::filesystem::path& path) {
  write_file(path, report_to_json(r));
}

MetricReport load_report(const std::filesystem::path& path) {
  try {
    return report_from_json(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// --------------------------------------------------------------- aggregate

std::string aggregate_to_json(const AggregateReport& a) {
  const auto stat = [](const char* name, const AggregateStat& s) {
    return "  \"" + std::string(name) + "_mean\": " + format_json_double(s.mean) +
           ",\n  \"" + std::string(name) + "_std\": " + format_json_double(s.stddev);
  };
  std::string out = "{\n";
  out += stat("accuracy", a.accuracy) + ",\n";
  out += stat("brier", a.brier) + ",\n";
  out += "  \"calibrated\": " + std::string(a.calibrated ? "true" : "false") + ",\n";
  out += stat("ece", a.ece) + ",\n";
  out += "  \"method\": " + jstr(a.method) + ",\n";
  out += "  \"runs\": " + std::to_string(a.runs) + ",\n";
  if (a.temperature) {
    out += stat("temperature", *a.temperature) + "\n";
  } else {
    out += "  \"temperature_mean\": null,\n  \"temperature_std\": null\n";
  }
  return out + "}\n";
}

void save_aggregate(const AggregateReport& a, const std::filesystem::path& path) {
  write_file(path, aggregate_to_json(a));
}

// --------------------------------------------------------------------- fit

std::string fit_to_json(const TemperatureFit& f) {
  return "{\n  \"at_bound\": " + std::string(f.at_bound ? "true" : "false") +
         ",\n  \"iterations\": " + std::to_string(f.iterations) +
         ",\n  \"nll_after\": " + format_json_double(f.nll_after) +
         ",\n  \"nll_before\": " + format_json_double(f.nll_before) +
         ",\n  \"t_max\": " + format_json_double(f.bounds.t_max) +
         ",\n  \"t_min\": " + format_json_double(f.bounds.t_min) +
         ",\n  \"temperature\": " + format_json_double(f.temperature) + "\n}\n";
}

TemperatureFit fit_from_json(const std::string& text) {
  const json j = parse(text, "temperature fit");
  require_keys(j, {"at_bound", "iterations", "nll_after", "nll_before", "t_max",
                   "t_min", "temperature"},
               "temperature fit");
  TemperatureFit f;
  f.temperature = get_finite(j, "temperature", "temperature fit");
  f.nll_before = get_finite(j, "nll_before", "temperature fit");
  f.nll_after = get_finite(j, "nll_after", "temperature fit");
  f.iterations = j.at("iterations").get<int>();
  f.bounds.t_min = get_finite(j, "t_min", "temperature fit");
  f.bounds.t_max = get_finite(j, "t_max", "temperature fit");
  if (!j.at("at_bound").is_boolean())
    throw DataError("temperature fit: 'at_bound' must be a boolean");
  f.at_bound = j.at("at_bound").get<bool>();
  if (!(f.temperature > 0.0))
    throw DataError("temperature fit: temperature must be positive");
  return f;
}

void save_fit(const TemperatureFit& f, const std::filesystem::path& path) {
  write_file(path, fit_to_json(f));
}

TemperatureFit load_fit(const std::filesystem::path& path) {
  try {
    return fit_from_json(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// ----------------------------------------------------------- openmax model

std::string openmax_to_json(const OpenMaxModel& m) {
  if (!m.fitted()) throw StateError("openmax_to_json: model is not fitted");
  std::string out = "{\n  \"alpha\": " + std::to_string(m.alpha) +
                    ",\n  \"distance\": " +
                    jstr(m.distance == DistanceKind::Euclidean ? "euclidean" : "cosine") +
                    ",\n  \"eta\": " + std::to_string(m.tails.front().tail_size) +
                    ",\n  \"mavs\": [";
  for (std::size_t i = 0; i < m.mavs.rows(); ++i) {
    out += (i ? ",\n    " : "\n    ") + std::string("[");
    for (std::size_t j = 0; j < m.mavs.cols(); ++j)
      out += (j ? ", " : "") + format_json_double(m.mavs(i, j));
    out += "]";
  }
  out += "\n  ],\n  \"tails\": [";
  for (std::size_t i = 0; i < m.tails.size(); ++i) {
    out += (i ? ",\n    " : "\n    ");
    out += "{\"scale\": " + format_json_double(m.tails[i].scale) +
           ", \"shape\": " + format_json_double(m.tails[i].shape) + "}";
  }
  return out + "\n  ]\n}\n";
}

OpenMaxModel openmax_from_json(const std::string& text) {
  const json j = parse(text, "openmax model");
  require_keys(j, {"alpha", "distance", "eta", "mavs", "tails"}, "openmax model");
  OpenMaxModel m;
  m.alpha = j.at("alpha").get<std::int64_t>();
  const std::string dist = j.at("distance").get<std::string>();
  if (dist == "euclidean")
    m.distance = DistanceKind::Euclidean;
  else if (dist == "cosine")
    m.distance = DistanceKind::Cosine;
  else
    throw DataError("openmax model: unknown distance '" + dist + "'");
  const auto eta = j.at("eta").get<std::int64_t>();
  if (eta < 5) throw DataError("openmax model: eta must be >= 5");

  const auto& jm = j.at("mavs");
  if (!jm.is_array() || jm.empty())
    throw DataError("openmax model: 'mavs' must be a non-empty array");
  const std::size_t k = jm.size();
  m.mavs = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!jm[i].is_array() || jm[i].size() != k)
      throw DataError("openmax model: mavs must be a square K x K array");
    for (std::size_t c = 0; c < k; ++c) {
      if (!jm[i][c].is_number())
        throw DataError("openmax model: mav entries must be numbers");
      m.mavs(i, c) = jm[i][c].get<double>();
      if (!std::isfinite(m.mavs(i, c)))
        throw DataError("openmax model: non-finite mav entry");
    }
  }
  const auto& jt = j.at("tails");
  if (!jt.is_array() || jt.size() != k)
    throw DataError("openmax model: need one tail per class");
  for (const auto& t : jt) {
    require_keys(t, {"scale", "shape"}, "openmax tail");
    WeibullTailModel w;
    w.shape = get_finite(t, "shape", "openmax tail");
    w.scale = get_finite(t, "scale", "openmax tail");
    w.tail_size = eta;
    if (!(w.shape > 0.0) || !(w.scale > 0.0))
      throw DataError("openmax tail: shape and scale must be positive");
    m.tails.push_back(w);
  }
  if (m.alpha < 1 || m.alpha > static_cast<std::int64_t>(k))
    throw DataError("openmax model: alpha out of range [1, K]");
  return m;
}

void save_openmax(const OpenMaxModel& m, const std::filesystem::path& path) {
  write_file(path, openmax_to_json(m));
}

OpenMaxModel load_openmax(const std::filesystem::path& path) {
  try {
    return openmax_from_json(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace oscal
