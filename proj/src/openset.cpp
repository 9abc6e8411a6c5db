#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "oscal/error.hpp"
#include "oscal/kernels.hpp"
#include "oscal/openset.hpp"
#include "oscal/tensor.hpp"

namespace oscal {

ThresholdRule ThresholdRule::fixed(double tau) {
  if (std::isnan(tau)) throw InvalidArgument("ThresholdRule: tau is NaN");
  return {std::clamp(tau, 0.0, 1.0)};
}

LabelVector threshold_predict(const ProbMatrix& probs, const ThresholdRule& rule) {
  if (probs.mode() != ProbMode::RowStochastic)
    throw InvalidArgument("threshold_predict: needs a row-stochastic matrix");
  const double tau = std::clamp(rule.tau, 0.0, 1.0);
  const auto num_known = static_cast<std::int64_t>(probs.cols());
  std::vector<std::int64_t> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const ArgMax am = argmax_row(probs.row(i));
    out[i] = am.value >= tau ? static_cast<std::int64_t>(am.index) : num_known;
  }
  return LabelVector(std::move(out), num_known, true);
}

double choose_threshold(const ProbMatrix& val_probs, double retain_q) {
  if (val_probs.rows() < 20)
    throw FitError("choose_threshold: validation set too small: " +
                   std::to_string(val_probs.rows()) + " samples (need >= 20)");
  if (!(retain_q > 0.0 && retain_q <= 1.0))
    throw InvalidArgument("choose_threshold: retain_q must be in (0, 1]");

  std::vector<double> max_probs(val_probs.rows());
  for (std::size_t i = 0; i < val_probs.rows(); ++i)
    max_probs[i] = argmax_row(val_probs.row(i)).value;
  std::sort(max_probs.begin(), max_probs.end());
  const auto idx = static_cast<std::size_t>(
      std::floor((1.0 - retain_q) * static_cast<double>(max_probs.size() - 1)));
  return max_probs[idx];
}

double weibull_cdf(double d, const WeibullTailModel& model) {
  if (d <= 0.0) return 0.0;
  return 1.0 - std::exp(-std::pow(d / model.scale, model.shape));
}

WeibullTailModel fit_weibull_tail(std::vector<double> distances, std::int64_t eta) {
  if (eta < 5) throw InvalidArgument("fit_weibull_tail: eta must be >= 5");
  if (std::ssize(distances) < eta)
    throw FitError("fit_weibull_tail: " + std::to_string(distances.size()) +
                   " distances for tail size " + std::to_string(eta));
  for (double d : distances)
    if (!(d > 0.0) || !std::isfinite(d))
      throw FitError("fit_weibull_tail: distances must be positive finite reals");

  std::sort(distances.begin(), distances.end(), std::greater<>());
  distances.resize(static_cast<std::size_t>(eta));
  const double d_max = distances.front();
  if (distances.back() == d_max)
    throw FitError("fit_weibull_tail: degenerate tail (zero variance)");

  // Work on w = d/d_max in (0,1]; the shape equation is scale-invariant and
  // w^k cannot overflow for any bracketed k.
  const std::size_t n = distances.size();
  std::vector<double> w(n), log_w(n);
  double mean_log = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = distances[i] / d_max;
    log_w[i] = std::log(w[i]);
    mean_log += log_w[i];
  }
  mean_log /= static_cast<double>(n);

  const auto g = [&](double k) {
    double pk_sum = 0.0, pk_log_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pk = std::pow(w[i], k);
      pk_sum += pk;
      pk_log_sum += pk * log_w[i];
    }
    return pk_log_sum / pk_sum - 1.0 / k - mean_log;
  };

  double lo = 1e-3, hi = 1e3;
  if (!(g(lo) < 0.0) || !(g(hi) > 0.0))
    throw FitError("fit_weibull_tail: shape equation has no root in [1e-3, 1e3]");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double k = 0.5 * (lo + hi);

  double pk_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) pk_sum += std::pow(w[i], k);
  const double scale = d_max * std::pow(pk_sum / static_cast<double>(n), 1.0 / k);

  return {k, scale, eta};
}

double activation_distance(std::span<const double> a, std::span<const double> b,
                           DistanceKind kind) {
  if (a.size() != b.size())
    throw InvalidArgument("activation_distance: dimension mismatch");
  const auto& k = kernels::active();
  if (kind == DistanceKind::Euclidean)
    return std::sqrt(k.sum_sq_diff(a.data(), b.data(), a.size()));
  const double na = std::sqrt(k.sum_sq(a.data(), a.size()));
  const double nb = std::sqrt(k.sum_sq(b.data(), b.size()));
  if (na == 0.0 || nb == 0.0)
    throw InvalidArgument("activation_distance: cosine distance of a zero vector");
  return 1.0 - k.dot(a.data(), b.data(), a.size()) / (na * nb);
}

Matrix compute_mavs(const Matrix& activations, const LabelVector& labels,
                    const LabelVector& predictions, std::int64_t min_per_class) {
  if (activations.rows() != labels.size() || activations.rows() != predictions.size())
    throw InvalidArgument("compute_mavs: row/label/prediction count mismatch");
  if (min_per_class < 1)
    throw InvalidArgument("compute_mavs: min_per_class must be >= 1");
  const std::int64_t num_known = labels.num_known();

  Matrix mavs(static_cast<std::size_t>(num_known), activations.cols(), 0.0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_known), 0);
  for (std::size_t i = 0; i < activations.rows(); ++i) {
    if (labels[i] != predictions[i]) continue;  // only correctly classified rows
    const auto cls = static_cast<std::size_t>(labels[i]);
    const auto src = activations.row(i);
    const auto dst = mavs.row(cls);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    counts[cls] += 1;
  }
  for (std::int64_t c = 0; c < num_known; ++c) {
    if (counts[static_cast<std::size_t>(c)] < min_per_class)
      throw FitError("compute_mavs: class " + std::to_string(c) + " has only " +
                     std::to_string(counts[static_cast<std::size_t>(c)]) +
                     " correctly classified samples (need >= " +
                     std::to_string(min_per_class) + ")");
    kernels::active().scale_inplace(
        mavs.row(static_cast<std::size_t>(c)).data(), mavs.cols(),
        1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]));
  }
  return mavs;
}

OpenMaxModel openmax_fit(const Matrix& activations, const LabelVector& labels,
                         const OpenMaxConfig& cfg) {
  const std::int64_t num_known = labels.num_known();
  if (static_cast<std::int64_t>(activations.cols()) != num_known)
    throw InvalidArgument("openmax_fit: activations must have one column per known class");
  const std::int64_t alpha = cfg.alpha == 0 ? std::min<std::int64_t>(3, num_known)
                                            : cfg.alpha;
  if (alpha < 1 || alpha > num_known)
    throw InvalidArgument("openmax_fit: alpha must be in [1, " +
                          std::to_string(num_known) + "]");

  std::vector<std::int64_t> pred(activations.rows());
  for (std::size_t i = 0; i < activations.rows(); ++i)
    pred[i] = static_cast<std::int64_t>(argmax_row(activations.row(i)).index);
  const LabelVector predictions(std::move(pred), num_known, false);

  OpenMaxModel model;
  model.mavs = compute_mavs(activations, labels, predictions, cfg.eta);
  model.alpha = alpha;
  model.distance = cfg.distance;

  std::vector<std::vector<double>> dists(static_cast<std::size_t>(num_known));
  for (std::size_t i = 0; i < activations.rows(); ++i) {
    if (labels[i] != predictions[i]) continue;
    const auto cls = static_cast<std::size_t>(labels[i]);
    dists[cls].push_back(
        activation_distance(activations.row(i), model.mavs.row(cls), cfg.distance));
  }
  model.tails.reserve(static_cast<std::size_t>(num_known));
  for (std::int64_t c = 0; c < num_known; ++c) {
    try {
      model.tails.push_back(
          fit_weibull_tail(dists[static_cast<std::size_t>(c)], cfg.eta));
    } catch (const FitError& e) {
      throw FitError("openmax_fit: class " + std::to_string(c) + ": " + e.what());
    }
  }
  return model;
}

std::vector<double> openmax_recalibrate(std::span<const double> activation_row,
                                        const OpenMaxModel& model) {
  if (!model.fitted()) throw StateError("openmax_recalibrate: model is not fitted");
  const std::size_t num_known = static_cast<std::size_t>(model.num_classes());
  if (activation_row.size() != num_known || model.mavs.cols() != num_known)
    throw InvalidArgument("openmax_recalibrate: activation dimension mismatch");

  std::vector<std::size_t> order(num_known);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (activation_row[a] != activation_row[b])
      return activation_row[a] > activation_row[b];
    return a < b;
  });

  std::vector<double> revised(num_known + 1);
  for (std::size_t j = 0; j < num_known; ++j) revised[j] = activation_row[j];

  const auto alpha = static_cast<std::size_t>(model.alpha);
  double unknown = 0.0;
  for (std::size_t r = 1; r <= alpha; ++r) {
    const std::size_t j = order[r - 1];
    const double dist = activation_distance(activation_row, model.mavs.row(j),
                                            model.distance);
    const double rank_weight =
        static_cast<double>(alpha - r + 1) / static_cast<double>(alpha);
    const double omega = 1.0 - rank_weight * weibull_cdf(dist, model.tails[j]);
    revised[j] = activation_row[j] * omega;
    unknown += activation_row[j] * (1.0 - omega);
  }
  revised[num_known] = unknown;
  return revised;
}

OpenMaxPrediction openmax_predict(const Matrix& activations, const OpenMaxModel& model) {
  if (!model.fitted()) throw StateError("openmax_predict: model is not fitted");
  const std::size_t num_known = static_cast<std::size_t>(model.num_classes());
  if (activations.rows() > 0 && activations.cols() != num_known)
    throw InvalidArgument("openmax_predict: expected " + std::to_string(num_known) +
                          " activation columns, got " + std::to_string(activations.cols()));

  Matrix probs(activations.rows(), num_known + 1);
  std::vector<std::int64_t> labels(activations.rows());
  for (std::size_t i = 0; i < activations.rows(); ++i) {
    const auto revised = openmax_recalibrate(activations.row(i), model);
    softmax_row(revised, probs.row(i), 1.0);
    labels[i] = static_cast<std::int64_t>(argmax_row(probs.row(i)).index);
  }
  return {ProbMatrix(std::move(probs), ProbMode::RowStochastic),
          LabelVector(std::move(labels), static_cast<std::int64_t>(num_known), true)};
}

}  // namespace oscal
