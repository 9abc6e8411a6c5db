// oscal: split / synth / calibrate / predict / evaluate / aggregate / diagram.
// Exit codes: 0 ok, 1 usage, 2 data or format error, 3 numerical fit failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscal/calibration.hpp"
#include "oscal/dataio.hpp"
#include "oscal/error.hpp"
#include "oscal/evaluate.hpp"
#include "oscal/json_io.hpp"
#include "oscal/metrics.hpp"
#include "oscal/openset.hpp"
#include "oscal/protocol.hpp"
#include "oscal/svg.hpp"
#include "oscal/synth.hpp"
#include "oscal/tensor.hpp"

namespace fs = std::filesystem;
using namespace oscal;

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

ArrayFormat parse_format(const std::string& s) {
  return s == "npy" ? ArrayFormat::Npy : ArrayFormat::Csv;
}

DistanceKind parse_distance(const std::string& s) {
  return s == "cosine" ? DistanceKind::Cosine : DistanceKind::Euclidean;
}

BrierColumns parse_brier_cols(const std::string& s) {
  return s == "k" ? BrierColumns::FirstKOnly : BrierColumns::AllKPlusOne;
}

struct SplitArgs {
  std::uint64_t seed = 42;
  std::int64_t runs = 5;
  std::int64_t total = 10;
  std::int64_t known = 6;
  std::string dataset = "synthetic";
  std::string out_dir;
};

void run_split(const SplitArgs& a) {
  fs::create_directories(a.out_dir);
  for (std::int64_t r = 0; r < a.runs; ++r) {
    const RunManifest m =
        generate_split({a.total, a.known, a.seed, r}, a.dataset);
    save_manifest(m, fs::path(a.out_dir) /
                         ("manifest_run" + std::to_string(r) + ".json"));
  }
}

struct SynthArgs {
  SynthConfig config;
  std::string format = "npy";
  std::string out_dir;
};

void run_synth(const SynthArgs& a) {
  const SynthDataset data = synth_generate(a.config);
  fs::create_directories(a.out_dir);
  const ArrayFormat fmt = parse_format(a.format);
  const std::string ext = fmt == ArrayFormat::Npy ? ".npy" : ".csv";
  const fs::path dir(a.out_dir);
  save_array(data.train_logits, dir / ("train_logits" + ext), fmt);
  save_labels(data.train_labels.labels(), dir / ("train_labels" + ext), fmt);
  save_array(data.val_logits, dir / ("val_logits" + ext), fmt);
  save_labels(data.val_labels.labels(), dir / ("val_labels" + ext), fmt);
  save_array(data.test_logits, dir / ("test_logits" + ext), fmt);
  save_labels(data.test_labels.labels(), dir / ("test_labels" + ext), fmt);
}

struct CalibrateArgs {
  std::string val_logits, val_labels, out;
  std::int64_t known = 6;
  TemperatureBounds bounds;
  double tol = 1e-4;
};

void run_calibrate(const CalibrateArgs& a) {
  const Matrix logits = load_array(a.val_logits);
  validate_logits(logits, "validation logits");
  const LabelVector labels = load_labels(a.val_labels, a.known, false);
  const TemperatureFit fit = fit_temperature(logits, labels, a.bounds, a.tol);
  save_fit(fit, a.out);
}

// Shared by predict and evaluate: resolve tau and the OpenMax model from the
// flag combination the user picked.
struct OpenSetArgs {
  double tau = -1.0;  // < 0 = unset
  std::string val_logits;
  double retain_q = 0.95;
  std::string model_path;
  std::string train_logits, train_labels;
  std::string save_model;
  std::int64_t eta = 20;
  std::int64_t alpha = 0;
  std::string distance = "euclidean";
};

double resolve_tau(const OpenSetArgs& a) {
  if (a.tau >= 0.0) return std::min(a.tau, 1.0);
  if (a.val_logits.empty())
    throw InvalidArgument("threshold method needs --tau or --val-logits");
  const Matrix val = load_array(a.val_logits);
  validate_logits(val, "validation logits");
  // the rejection rule is decided on uncalibrated probabilities
  return choose_threshold(softmax(val, 1.0), a.retain_q);
}

OpenMaxModel resolve_openmax(const OpenSetArgs& a, std::int64_t known) {
  if (!a.model_path.empty() && a.train_logits.empty())
    return load_openmax(a.model_path);
  if (a.train_logits.empty() || a.train_labels.empty())
    throw InvalidArgument(
        "openmax method needs --model, or --train-logits with --train-labels");
  const Matrix train = load_array(a.train_logits);
  validate_logits(train, "training activations");
  const LabelVector labels = load_labels(a.train_labels, known, false);
  OpenMaxConfig cfg;
  cfg.eta = a.eta;
  cfg.alpha = a.alpha;
  cfg.distance = parse_distance(a.distance);
  const OpenMaxModel model = openmax_fit(train, labels, cfg);
  if (!a.save_model.empty()) save_openmax(model, a.save_model);
  return model;
}

struct PredictArgs {
  std::string method = "closed";
  std::string logits;
  std::int64_t known = 6;
  double temperature = 0.0;  // 0 = unset
  std::string fit_path;
  OpenSetArgs open;
  bool renormalize_osr = false;
  std::string out_probs, out_labels;
  std::string format = "npy";
};

double resolve_temperature(double flag_value, const std::string& fit_path) {
  if (flag_value > 0.0 && !fit_path.empty())
    throw InvalidArgument("give either --temperature or --fit, not both");
  if (flag_value > 0.0) return flag_value;
  if (!fit_path.empty()) return load_fit(fit_path).temperature;
  return 1.0;
}

void run_predict(const PredictArgs& a) {
  const Matrix logits = load_array(a.logits);
  validate_logits(logits, "logits");
  const Method method = method_from_name(a.method);
  const double t = resolve_temperature(a.temperature, a.fit_path);
  const ArrayFormat fmt = parse_format(a.format);

  Matrix out_probs;
  std::vector<std::int64_t> out_labels;
  if (method == Method::Closed) {
    const ProbMatrix probs = softmax(logits, t);
    out_probs = probs.values();
    for (std::size_t i = 0; i < probs.rows(); ++i)
      out_labels.push_back(static_cast<std::int64_t>(argmax_row(probs.row(i)).index));
  } else if (method == Method::Threshold) {
    const double tau = resolve_tau(a.open);
    const LabelVector pred =
        threshold_predict(softmax(logits, 1.0), ThresholdRule::fixed(tau));
    out_probs = extend_osr(softmax(logits, t), a.renormalize_osr).values();
    out_labels = pred.labels();
  } else {
    const OpenMaxModel model = resolve_openmax(a.open, a.known);
    Matrix probs(logits.rows(), static_cast<std::size_t>(model.num_classes()) + 1);
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      const auto revised = openmax_recalibrate(logits.row(i), model);
      out_labels.push_back(static_cast<std::int64_t>(argmax_row(revised).index));
      softmax_row(revised, probs.row(i), t);
    }
    out_probs = std::move(probs);
  }
  save_array(out_probs, a.out_probs, fmt);
  save_labels(out_labels, a.out_labels, fmt);
}

struct EvaluateArgs {
  std::string method = "closed";
  std::string test_logits, test_labels;
  std::int64_t known = 6;
  double temperature = 0.0;
  std::string fit_path;
  OpenSetArgs open;
  EvaluateOptions options;
  std::string brier_cols = "k+1";
  std::string out_before, out_after;
};

void run_evaluate(const EvaluateArgs& a) {
  const Matrix logits = load_array(a.test_logits);
  validate_logits(logits, "test logits");
  const LabelVector labels = load_labels(a.test_labels, a.known, true);
  const Method method = method_from_name(a.method);

  if (a.temperature <= 0.0 && a.fit_path.empty())
    throw InvalidArgument("evaluate needs --temperature or --fit for the "
                          "calibrated condition");
  const double t = resolve_temperature(a.temperature, a.fit_path);

  EvaluateOptions options = a.options;
  options.brier_cols = parse_brier_cols(a.brier_cols);

  MethodInputs inputs;
  OpenMaxModel model;
  if (method == Method::Threshold) inputs.tau = resolve_tau(a.open);
  if (method == Method::OpenMax) {
    model = resolve_openmax(a.open, a.known);
    inputs.model = &model;
  }

  save_report(evaluate_method(method, logits, labels, std::nullopt, inputs, options),
              a.out_before);
  save_report(evaluate_method(method, logits, labels, t, inputs, options),
              a.out_after);
}

struct AggregateArgs {
  std::vector<std::string> reports;
  std::string out;
};

void run_aggregate(const AggregateArgs& a) {
  std::vector<MetricReport> reports;
  for (const auto& p : a.reports) reports.push_back(load_report(p));
  save_aggregate(aggregate_runs(reports), a.out);
}

struct DiagramArgs {
  std::string report;
  std::string out;
  int width = 480;
  int height = 420;
  std::string title;
};

void run_diagram(const DiagramArgs& a) {
  const MetricReport r = load_report(a.report);
  DiagramOptions opt;
  opt.width = a.width;
  opt.height = a.height;
  opt.title = a.title.empty()
                  ? r.method + (r.calibrated ? " (calibrated), " : " (uncalibrated), ") +
                        "ece=" + format_json_double(r.ece)
                  : a.title;
  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + a.out + " for writing");
  out << render_reliability_svg(r.bins, opt);
  if (!out) throw DataError("write failed: " + a.out);
}

void add_openset_flags(CLI::App* cmd, OpenSetArgs& open, bool with_tau) {
  if (with_tau) {
    cmd->add_option("--tau", open.tau, "Fixed rejection threshold in [0,1]");
    cmd->add_option("--val-logits", open.val_logits,
                    "Known-only validation logits for choosing tau");
    cmd->add_option("--retain-q", open.retain_q,
                    "Fraction of validation knowns to retain (default 0.95)");
  }
  cmd->add_option("--model", open.model_path, "Fitted OpenMax model JSON");
  cmd->add_option("--train-logits", open.train_logits,
                  "Training activations for fitting OpenMax");
  cmd->add_option("--train-labels", open.train_labels, "Training labels");
  cmd->add_option("--save-model", open.save_model,
                  "Write the fitted OpenMax model here");
  cmd->add_option("--eta", open.eta, "Weibull tail size (default 20)");
  cmd->add_option("--alpha", open.alpha,
                  "Top classes to revise (default min(3, K))");
  cmd->add_option("--distance", open.distance, "euclidean or cosine")
      ->check(CLI::IsMember({"euclidean", "cosine"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-hoc calibration and open-set recognition evaluation"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Write seeded known/unknown class splits");
  split->add_option("--seed", split_args.seed, "Base seed (default 42)");
  split->add_option("--runs", split_args.runs, "Number of runs (default 5)");
  split->add_option("--total", split_args.total, "Total classes (default 10)");
  split->add_option("--known", split_args.known, "Known classes (default 6)");
  split->add_option("--dataset", split_args.dataset, "Dataset name for the manifest");
  split->add_option("--out-dir", split_args.out_dir, "Output directory")->required();
  split->callback([&] { run_split(split_args); });

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate synthetic logits and labels");
  synth->add_option("--seed", synth_args.config.seed, "Base seed (default 42)");
  synth->add_option("--run-index", synth_args.config.run_index,
                    "Run index mixed into the seed (default 0)");
  synth->add_option("--known", synth_args.config.num_known, "Known classes (default 6)");
  synth->add_option("--unknown", synth_args.config.num_unknown,
                    "Unknown classes (default 4)");
  synth->add_option("--per-class", synth_args.config.per_class,
                    "Samples per class (default 2000)");
  synth->add_option("--dim", synth_args.config.dim, "Activation dimension (default 8)");
  synth->add_option("--sep", synth_args.config.separation,
                    "Class separation (default 4)");
  synth->add_option("--sigma", synth_args.config.sigma, "Noise sigma (default 1)");
  synth->add_option("--miscal", synth_args.config.miscal,
                    "Miscalibration scale c (default 3)");
  synth->add_option("--format", synth_args.format, "csv or npy (default npy)")
      ->check(CLI::IsMember({"csv", "npy"}));
  synth->add_option("--out-dir", synth_args.out_dir, "Output directory")->required();
  synth->callback([&] { run_synth(synth_args); });

  CalibrateArgs cal_args;
  auto* cal = app.add_subcommand("calibrate", "Fit temperature on validation data");
  cal->add_option("--val-logits", cal_args.val_logits, "Validation logits")->required();
  cal->add_option("--val-labels", cal_args.val_labels, "Validation labels")->required();
  cal->add_option("--known", cal_args.known, "Number of known classes")->required();
  cal->add_option("--t-min", cal_args.bounds.t_min, "Lower bound (default 0.05)");
  cal->add_option("--t-max", cal_args.bounds.t_max, "Upper bound (default 20)");
  cal->add_option("--tol", cal_args.tol, "Relative bracket tolerance (default 1e-4)");
  cal->add_option("--out", cal_args.out, "Output fit JSON")->required();
  cal->callback([&] { run_calibrate(cal_args); });

  PredictArgs pred_args;
  auto* pred = app.add_subcommand("predict", "Write probabilities and labels");
  pred->add_option("--method", pred_args.method, "closed, threshold or openmax")
      ->check(CLI::IsMember({"closed", "threshold", "openmax"}))
      ->required();
  pred->add_option("--logits", pred_args.logits, "Input logits/activations")->required();
  pred->add_option("--known", pred_args.known, "Number of known classes")->required();
  pred->add_option("--temperature", pred_args.temperature,
                   "Temperature for reported probabilities");
  pred->add_option("--fit", pred_args.fit_path, "Temperature fit JSON");
  pred->add_flag("--renormalize-osr", pred_args.renormalize_osr,
                 "Renormalize OSR-extended rows");
  add_openset_flags(pred, pred_args.open, true);
  pred->add_option("--out-probs", pred_args.out_probs, "Output probabilities")->required();
  pred->add_option("--out-labels", pred_args.out_labels, "Output labels")->required();
  pred->add_option("--format", pred_args.format, "csv or npy (default npy)")
      ->check(CLI::IsMember({"csv", "npy"}));
  pred->callback([&] { run_predict(pred_args); });

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate",
                                  "Metric reports before and after calibration");
  eval->add_option("--method", eval_args.method, "closed, threshold or openmax")
      ->check(CLI::IsMember({"closed", "threshold", "openmax"}))
      ->required();
  eval->add_option("--test-logits", eval_args.test_logits, "Test logits")->required();
  eval->add_option("--test-labels", eval_args.test_labels, "Test labels")->required();
  eval->add_option("--known", eval_args.known, "Number of known classes")->required();
  eval->add_option("--temperature", eval_args.temperature,
                   "Fitted temperature for the calibrated condition");
  eval->add_option("--fit", eval_args.fit_path, "Temperature fit JSON");
  eval->add_option("--bins", eval_args.options.bins, "ECE bins (default 15)");
  eval->add_flag("--renormalize-osr", eval_args.options.renormalize_osr,
                 "Renormalize OSR-extended rows");
  eval->add_option("--brier-cols", eval_args.brier_cols,
                   "Open-set Brier columns: k or k+1 (default k+1)")
      ->check(CLI::IsMember({"k", "k+1"}));
  add_openset_flags(eval, eval_args.open, true);
  eval->add_option("--out-before", eval_args.out_before,
                   "Report before calibration")->required();
  eval->add_option("--out-after", eval_args.out_after,
                   "Report after calibration")->required();
  eval->callback([&] { run_evaluate(eval_args); });

  AggregateArgs agg_args;
  auto* agg = app.add_subcommand("aggregate", "Fold per-run reports into mean/std");
  agg->add_option("reports", agg_args.reports, "Report JSON files")->required();
  agg->add_option("--out", agg_args.out, "Output aggregate JSON")->required();
  agg->callback([&] { run_aggregate(agg_args); });

  DiagramArgs dia_args;
  auto* dia = app.add_subcommand("diagram", "Render a reliability diagram SVG");
  dia->add_option("--report", dia_args.report, "Metric report JSON")->required();
  dia->add_option("--out", dia_args.out, "Output SVG path")->required();
  dia->add_option("--width", dia_args.width, "Canvas width (default 480)");
  dia->add_option("--height", dia_args.height, "Canvas height (default 420)");
  dia->add_option("--title", dia_args.title, "Custom title");
  dia->callback([&] { run_diagram(dia_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "oscal: error: usage: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "oscal: error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "oscal: error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
