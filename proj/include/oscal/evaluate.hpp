#pragma once

#include <optional>
#include <string>

#include "oscal/matrix.hpp"
#include "oscal/metrics.hpp"
#include "oscal/openset.hpp"

namespace oscal {

enum class Method { Closed, Threshold, OpenMax };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct EvaluateOptions {
  int bins = 15;
  bool renormalize_osr = false;
  BrierColumns brier_cols = BrierColumns::AllKPlusOne;
};

/// Decision parameters of the open-set methods. The open/unknown decision is
/// always made on uncalibrated probabilities (or raw activations); a supplied
/// temperature rescales the reported probabilities only, so each method keeps
/// a single accuracy across calibration conditions.
struct MethodInputs {
  double tau = 0.0;                     // threshold method
  const OpenMaxModel* model = nullptr;  // openmax method
};

/// One Table-row cell group:
///  - Closed: softmax over K on the known-labeled subset of the test set;
///    argmax prediction, ECE/Brier/accuracy over K columns.
///  - Threshold: softmax over K, thresholded labels, OSR-extended K+1 matrix
///    for ECE (confidence = row max) and the open-set Brier score.
///  - OpenMax: revised activations, softmax over K+1, argmax labels.
/// temperature == nullopt produces the uncalibrated ("before") report.
MetricReport evaluate_method(Method method, const Matrix& test_logits,
                             const LabelVector& test_labels,
                             std::optional<double> temperature,
                             const MethodInputs& inputs,
                             const EvaluateOptions& options = {});

}  // namespace oscal
