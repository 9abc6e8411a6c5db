#pragma once

#include "oscal/matrix.hpp"

namespace oscal {

struct TemperatureBounds {
  double t_min = 0.05;
  double t_max = 20.0;
};

struct TemperatureFit {
  double temperature;
  double nll_before;  // NLL at T = 1
  double nll_after;   // NLL at the fitted temperature
  int iterations;
  TemperatureBounds bounds;
  bool at_bound;  // optimum pinned to t_min or t_max
};

/// Mean negative log-likelihood of the true labels under softmax(logits / T).
/// Labels must be known-only (an unknown label is an InvalidArgument: the
/// model never saw unknowns, so they carry no calibration signal).
double nll(const Matrix& logits, const LabelVector& labels, double temperature);

/// Fits T by golden-section search over beta = 1/T, where the NLL is convex
/// (logsumexp of linear functions minus a linear function). The best sampled
/// point wins, with beta = 1 and both bounds always in the candidate set, so
/// nll_after <= nll_before holds exactly and boundary optima are returned
/// exactly. Deterministic. Needs >= 10 samples and at least one non-constant
/// logit row; otherwise throws FitError.
TemperatureFit fit_temperature(const Matrix& val_logits, const LabelVector& val_labels,
                               TemperatureBounds bounds = {}, double tol = 1e-4);

/// softmax(logits, T); per-row argmax is unchanged versus T = 1.
ProbMatrix apply_temperature(const Matrix& logits, double temperature);

}  // namespace oscal
