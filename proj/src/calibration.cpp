#include <cmath>
#include <string>

#include "oscal/calibration.hpp"
#include "oscal/error.hpp"
#include "oscal/kernels.hpp"
#include "oscal/tensor.hpp"

namespace oscal {
namespace {

void check_nll_inputs(const Matrix& logits, const LabelVector& labels) {
  if (logits.rows() != labels.size())
    throw InvalidArgument("nll: " + std::to_string(logits.rows()) + " logit rows vs " +
                          std::to_string(labels.size()) + " labels");
  if (logits.cols() < 2) throw InvalidArgument("nll: need at least two classes");
  if (static_cast<std::int64_t>(logits.cols()) != labels.num_known())
    throw InvalidArgument("nll: logit columns do not match num_known");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == labels.unknown_index())
      throw InvalidArgument("nll: unknown label at row " + std::to_string(i) +
                            " (calibration uses known classes only)");
}

// mean_i [ logsumexp(z_i * beta) - z_{i,y_i} * beta ]
double nll_at_beta(const Matrix& logits, const LabelVector& labels, double beta) {
  const auto& k = kernels::active();
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto row = logits.row(i);
    const double m = k.reduce_max(row.data(), row.size());
    const double lse =
        m * beta + std::log(k.exp_shift_scale_sum(row.data(), row.size(), m, beta));
    acc += lse - row[static_cast<std::size_t>(labels[i])] * beta;
  }
  return acc / static_cast<double>(logits.rows());
}

}  // namespace

double nll(const Matrix& logits, const LabelVector& labels, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("nll: temperature must be a positive finite real");
  check_nll_inputs(logits, labels);
  return nll_at_beta(logits, labels, 1.0 / temperature);
}

TemperatureFit fit_temperature(const Matrix& val_logits, const LabelVector& val_labels,
                               TemperatureBounds bounds, double tol) {
  check_nll_inputs(val_logits, val_labels);
  if (val_logits.rows() < 10)
    throw FitError("validation set too small: " + std::to_string(val_logits.rows()) +
                   " samples (need >= 10)");
  if (!(bounds.t_min > 0.0) || !(bounds.t_max > bounds.t_min))
    throw InvalidArgument("fit_temperature: need 0 < t_min < t_max");
  if (!(tol > 0.0)) throw InvalidArgument("fit_temperature: tol must be positive");

  bool degenerate = true;
  for (std::size_t i = 0; i < val_logits.rows() && degenerate; ++i) {
    const auto row = val_logits.row(i);
    for (std::size_t j = 1; j < row.size(); ++j)
      if (row[j] != row[0]) {
        degenerate = false;
        break;
      }
  }
  if (degenerate)
    throw FitError("degenerate logits: every row is constant, NLL does not depend on T");

  const double beta_lo = 1.0 / bounds.t_max;
  const double beta_hi = 1.0 / bounds.t_min;

  double best_beta = beta_lo;
  double best_val = nll_at_beta(val_logits, val_labels, beta_lo);
  const auto consider = [&](double beta, double val) {
    if (val < best_val) {
      best_val = val;
      best_beta = beta;
    }
  };
  consider(beta_hi, nll_at_beta(val_logits, val_labels, beta_hi));

  const double nll_before = nll_at_beta(val_logits, val_labels, 1.0);
  if (1.0 >= beta_lo && 1.0 <= beta_hi) consider(1.0, nll_before);

  // Golden-section on beta; one new evaluation per iteration.
  const double inv_phi = 0.6180339887498948482;
  double a = beta_lo, b = beta_hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = nll_at_beta(val_logits, val_labels, c);
  double fd = nll_at_beta(val_logits, val_labels, d);
  consider(c, fc);
  consider(d, fd);

  int iterations = 0;
  while (b - a > tol * (0.5 * (a + b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = nll_at_beta(val_logits, val_labels, c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = nll_at_beta(val_logits, val_labels, d);
      consider(d, fd);
    }
    ++iterations;
  }

  TemperatureFit fit;
  fit.temperature = best_beta == beta_lo   ? bounds.t_max
                    : best_beta == beta_hi ? bounds.t_min
                                           : 1.0 / best_beta;
  fit.nll_before = nll_before;
  fit.nll_after = best_val;
  fit.iterations = iterations;
  fit.bounds = bounds;
  fit.at_bound = best_beta == beta_lo || best_beta == beta_hi;
  return fit;
}

ProbMatrix apply_temperature(const Matrix& logits, double temperature) {
  return softmax(logits, temperature);
}

}  // namespace oscal
