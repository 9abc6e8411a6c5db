#include <cmath>
#include <vector>

#include "oscal/error.hpp"
#include "oscal/evaluate.hpp"
#include "oscal/tensor.hpp"

namespace oscal {

std::string method_name(Method m) {
  switch (m) {
    case Method::Closed: return "closed-set";
    case Method::Threshold: return "open-set-threshold";
    case Method::OpenMax: return "open-set-openmax";
  }
  throw InvalidArgument("method_name: bad enum value");
}

Method method_from_name(const std::string& name) {
  if (name == "closed-set" || name == "closed") return Method::Closed;
  if (name == "open-set-threshold" || name == "threshold") return Method::Threshold;
  if (name == "open-set-openmax" || name == "openmax") return Method::OpenMax;
  throw InvalidArgument("unknown method '" + name + "'");
}

namespace {

MetricReport make_report(Method method, std::optional<double> temperature,
                         double brier, const EceResult& ece_result, double accuracy) {
  MetricReport r;
  r.method = method_name(method);
  r.calibrated = temperature.has_value();
  r.brier = brier;
  r.ece = ece_result.ece;
  r.accuracy = accuracy;
  r.temperature = temperature;
  r.bins = ece_result.table;
  return r;
}

MetricReport evaluate_closed(const Matrix& logits, const LabelVector& labels,
                             std::optional<double> temperature,
                             const EvaluateOptions& opt) {
  // Closed-set scores describe the conventional classification problem, so
  // unknown-labeled test rows are excluded.
  std::vector<std::size_t> keep;
  keep.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != labels.unknown_index()) keep.push_back(i);
  if (keep.empty())
    throw InvalidArgument("evaluate: no known-labeled samples for the closed-set method");

  Matrix sub(keep.size(), logits.cols());
  std::vector<std::int64_t> sub_labels(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto src = logits.row(keep[i]);
    const auto dst = sub.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j];
    sub_labels[i] = labels[keep[i]];
  }
  const LabelVector known_labels(std::move(sub_labels), labels.num_known(), false);

  const ProbMatrix probs = softmax(sub, temperature.value_or(1.0));
  const EceResult e = ece(probs, known_labels, opt.bins);
  return make_report(Method::Closed, temperature, brier_closed(probs, known_labels), e,
                     accuracy_closed(probs, known_labels));
}

MetricReport evaluate_threshold(const Matrix& logits, const LabelVector& labels,
                                std::optional<double> temperature, double tau,
                                const EvaluateOptions& opt) {
  // Decide on uncalibrated probabilities, report on tempered ones.
  const LabelVector predicted =
      threshold_predict(softmax(logits, 1.0), ThresholdRule::fixed(tau));
  const ProbMatrix reported = softmax(logits, temperature.value_or(1.0));
  const ProbMatrix extended = extend_osr(reported, opt.renormalize_osr);
  const EceResult e = ece_with_predictions(extended, predicted, labels, opt.bins);
  return make_report(Method::Threshold, temperature,
                     brier_osr(extended, labels, opt.brier_cols), e,
                     accuracy_osr(predicted, labels));
}

MetricReport evaluate_openmax(const Matrix& logits, const LabelVector& labels,
                              std::optional<double> temperature,
                              const OpenMaxModel& model, const EvaluateOptions& opt) {
  const std::size_t n = logits.rows();
  const std::size_t num_known = static_cast<std::size_t>(model.num_classes());
  Matrix probs(n, num_known + 1);
  std::vector<std::int64_t> pred(n);
  const double t = temperature.value_or(1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto revised = openmax_recalibrate(logits.row(i), model);
    // the revised-activation argmax decides; T only rescales confidence
    pred[i] = static_cast<std::int64_t>(argmax_row(revised).index);
    softmax_row(revised, probs.row(i), t);
  }
  const ProbMatrix reported(std::move(probs), ProbMode::RowStochastic);
  const LabelVector predicted(std::move(pred), labels.num_known(), true);
  const EceResult e = ece_with_predictions(reported, predicted, labels, opt.bins);
  return make_report(Method::OpenMax, temperature,
                     brier_osr(reported, labels, opt.brier_cols), e,
                     accuracy_osr(predicted, labels));
}

}  // namespace

MetricReport evaluate_method(Method method, const Matrix& test_logits,
                             const LabelVector& test_labels,
                             std::optional<double> temperature,
                             const MethodInputs& inputs, const EvaluateOptions& options) {
  if (test_logits.rows() != test_labels.size())
    throw InvalidArgument("evaluate: logit rows do not match label count");
  if (static_cast<std::int64_t>(test_logits.cols()) != test_labels.num_known())
    throw InvalidArgument("evaluate: logit columns do not match num_known");
  if (temperature && (!(*temperature > 0.0) || !std::isfinite(*temperature)))
    throw InvalidArgument("evaluate: temperature must be a positive finite real");

  switch (method) {
    case Method::Closed:
      return evaluate_closed(test_logits, test_labels, temperature, options);
    case Method::Threshold:
      return evaluate_threshold(test_logits, test_labels, temperature, inputs.tau,
                                options);
    case Method::OpenMax:
      if (!inputs.model) throw StateError("evaluate: openmax method needs a fitted model");
      return evaluate_openmax(test_logits, test_labels, temperature, *inputs.model,
                              options);
  }
  throw InvalidArgument("evaluate: bad method enum value");
}

}  // namespace oscal
