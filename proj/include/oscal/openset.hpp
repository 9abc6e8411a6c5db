#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oscal/matrix.hpp"

namespace oscal {

/// Max-probability rejection rule; tau is clamped into [0,1].
struct ThresholdRule {
  double tau = 0.0;
  static ThresholdRule fixed(double tau);
};

/// Per row: argmax index if the max probability >= tau, else the unknown
/// index K.
LabelVector threshold_predict(const ProbMatrix& probs, const ThresholdRule& rule);

/// tau = the (1-q)-quantile (lower interpolation) of the per-row max
/// probabilities of known-only validation samples, so at least a q fraction
/// of validation knowns stays accepted. Needs >= 20 rows.
double choose_threshold(const ProbMatrix& val_probs, double retain_q = 0.95);

/// Two-parameter Weibull fitted by maximum likelihood on the eta largest
/// distances of one class.
struct WeibullTailModel {
  double shape;   // k
  double scale;   // lambda
  std::int64_t tail_size;
};

/// 0 for d <= 0, else 1 - exp(-(d/scale)^shape).
double weibull_cdf(double d, const WeibullTailModel& model);

/// MLE via bisection on the shape: g(k) = sum(d^k ln d)/sum(d^k) - 1/k -
/// mean(ln d) is increasing in k and vanishes at the optimum; then
/// scale = (mean d^k)^(1/k). Throws FitError for fewer than eta samples,
/// non-positive distances, or a constant tail.
WeibullTailModel fit_weibull_tail(std::vector<double> distances, std::int64_t eta);

enum class DistanceKind { Euclidean, Cosine };

double activation_distance(std::span<const double> a, std::span<const double> b,
                           DistanceKind kind);

struct OpenMaxConfig {
  std::int64_t eta = 20;    // tail size per class
  std::int64_t alpha = 0;   // top classes to revise; 0 = min(3, K)
  DistanceKind distance = DistanceKind::Euclidean;
};

struct OpenMaxModel {
  Matrix mavs;  // K x K mean activation vectors (one column per class)
  std::vector<WeibullTailModel> tails;
  std::int64_t alpha = 0;
  DistanceKind distance = DistanceKind::Euclidean;

  std::int64_t num_classes() const { return static_cast<std::int64_t>(mavs.rows()); }
  bool fitted() const { return mavs.rows() > 0 && tails.size() == mavs.rows(); }
};

/// Per-class mean of activation rows that are both labeled and predicted as
/// that class. Throws FitError naming any class with fewer than min_per_class
/// correct rows.
Matrix compute_mavs(const Matrix& activations, const LabelVector& labels,
                    const LabelVector& predictions, std::int64_t min_per_class);

/// MAVs + per-class Weibull tails on the distances of correctly classified
/// training rows to their MAV. Activations must have one column per class.
OpenMaxModel openmax_fit(const Matrix& activations, const LabelVector& labels,
                         const OpenMaxConfig& cfg);

/// Activation revision: rank classes by activation (ties to the lower index);
/// for rank r = 1..alpha, class j keeps the fraction
/// w_j = 1 - ((alpha - r + 1)/alpha) * weibull_cdf(dist(v, MAV_j)); the
/// removed mass sum_j v_j (1 - w_j) becomes the unknown activation. Returns
/// the K+1 revised activations; their sum equals the input sum.
std::vector<double> openmax_recalibrate(std::span<const double> activation_row,
                                        const OpenMaxModel& model);

struct OpenMaxPrediction {
  ProbMatrix probs;     // N x (K+1), row-stochastic
  LabelVector labels;   // argmax over the K+1 softmax probabilities
};

OpenMaxPrediction openmax_predict(const Matrix& activations, const OpenMaxModel& model);

}  // namespace oscal
