#include <cmath>
#include <vector>

#include "oscal/error.hpp"
#include "oscal/kernels.hpp"
#include "oscal/rng.hpp"
#include "oscal/synth.hpp"

namespace oscal {
namespace {

void check_config(const SynthConfig& c) {
  if (c.num_known < 2) throw InvalidArgument("synth: num_known must be >= 2");
  if (c.num_unknown < 0) throw InvalidArgument("synth: num_unknown must be >= 0");
  if (c.per_class < 1) throw InvalidArgument("synth: per_class must be >= 1");
  if (c.dim < c.num_known) throw InvalidArgument("synth: dim must be >= num_known");
  if (!(c.sigma > 0.0)) throw InvalidArgument("synth: sigma must be positive");
  if (!(c.miscal > 0.0)) throw InvalidArgument("synth: miscal must be positive");
  if (!(c.separation >= 0.0) || !std::isfinite(c.separation))
    throw InvalidArgument("synth: separation must be a finite nonnegative real");
  if (c.run_index < 0) throw InvalidArgument("synth: run_index must be >= 0");
}

// logit_j = miscal * (-0.5 * ||x - mu_j||^2 / sigma^2): the Bayes rule for an
// equal-prior isotropic Gaussian mixture, up to a per-row constant.
void fill_logits(const std::vector<double>& sample, const Matrix& known_means,
                 double sigma, double miscal, std::span<double> out) {
  const auto& k = kernels::active();
  const double scale = -0.5 * miscal / (sigma * sigma);
  for (std::size_t j = 0; j < known_means.rows(); ++j)
    out[j] = scale * k.sum_sq_diff(sample.data(), known_means.row(j).data(),
                                   sample.size());
}

}  // namespace

SynthDataset synth_generate(const SynthConfig& config) {
  check_config(config);
  const auto num_known = static_cast<std::size_t>(config.num_known);
  const auto num_unknown = static_cast<std::size_t>(config.num_unknown);
  const auto dim = static_cast<std::size_t>(config.dim);
  const auto per_class = static_cast<std::size_t>(config.per_class);

  SplitMix64 root = SplitMix64::for_run(config.seed,
                                        static_cast<std::uint64_t>(config.run_index));
  // Two sub-streams: integer picks must not interleave with the cached
  // Box-Muller spare.
  NormalSampler normals{SplitMix64(root.next())};
  SplitMix64 pick_rng(root.next());

  Matrix known_means(num_known, dim, 0.0);
  for (std::size_t j = 0; j < num_known; ++j)
    known_means(j, j) = config.separation;

  // Unknown means: midpoint of two distinct known means plus an orthogonal
  // offset of length separation/2.
  Matrix unknown_means(num_unknown, dim, 0.0);
  for (std::size_t u = 0; u < num_unknown; ++u) {
    const std::size_t a = static_cast<std::size_t>(pick_rng.below(num_known));
    std::size_t b = static_cast<std::size_t>(pick_rng.below(num_known - 1));
    if (b >= a) ++b;

    std::vector<double> axis(dim), offset(dim);
    for (std::size_t d = 0; d < dim; ++d)
      axis[d] = known_means(b, d) - known_means(a, d);
    const auto& k = kernels::active();
    double off_norm = 0.0;
    do {
      for (std::size_t d = 0; d < dim; ++d) offset[d] = normals.next();
      const double axis_sq = k.sum_sq(axis.data(), dim);
      const double proj = axis_sq > 0.0
                              ? k.dot(offset.data(), axis.data(), dim) / axis_sq
                              : 0.0;
      for (std::size_t d = 0; d < dim; ++d) offset[d] -= proj * axis[d];
      off_norm = std::sqrt(k.sum_sq(offset.data(), dim));
    } while (off_norm < 1e-12);
    const double target = 0.5 * config.separation;
    for (std::size_t d = 0; d < dim; ++d)
      unknown_means(u, d) =
          0.5 * (known_means(a, d) + known_means(b, d)) + target / off_norm * offset[d];
  }

  const std::size_t val_per_class = per_class / 10;  // the reserved 10%
  const std::size_t train_per_class = per_class - val_per_class;

  std::vector<double> sample(dim);
  const auto draw_sample = [&](const Matrix& means, std::size_t cls) {
    for (std::size_t d = 0; d < dim; ++d)
      sample[d] = means(cls, d) + config.sigma * normals.next();
  };

  Matrix train_logits(train_per_class * num_known, num_known);
  Matrix val_logits(val_per_class * num_known, num_known);
  std::vector<std::int64_t> train_labels, val_labels;
  train_labels.reserve(train_logits.rows());
  val_labels.reserve(val_logits.rows());

  std::size_t train_row = 0, val_row = 0;
  for (std::size_t cls = 0; cls < num_known; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      draw_sample(known_means, cls);
      const bool to_val = i >= train_per_class;
      auto out = to_val ? val_logits.row(val_row++) : train_logits.row(train_row++);
      fill_logits(sample, known_means, config.sigma, config.miscal, out);
      (to_val ? val_labels : train_labels).push_back(static_cast<std::int64_t>(cls));
    }
  }

  Matrix test_logits(per_class * (num_known + num_unknown), num_known);
  std::vector<std::int64_t> test_labels;
  test_labels.reserve(test_logits.rows());
  std::size_t test_row = 0;
  for (std::size_t cls = 0; cls < num_known; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      draw_sample(known_means, cls);
      fill_logits(sample, known_means, config.sigma, config.miscal,
                  test_logits.row(test_row++));
      test_labels.push_back(static_cast<std::int64_t>(cls));
    }
  }
  for (std::size_t u = 0; u < num_unknown; ++u) {
    for (std::size_t i = 0; i < per_class; ++i) {
      draw_sample(unknown_means, u);
      // the model only knows the K training classes
      fill_logits(sample, known_means, config.sigma, config.miscal,
                  test_logits.row(test_row++));
      test_labels.push_back(config.num_known);
    }
  }

  const std::int64_t k = config.num_known;
  return {std::move(train_logits), LabelVector(std::move(train_labels), k, false),
          std::move(val_logits),   LabelVector(std::move(val_labels), k, false),
          std::move(test_logits),  LabelVector(std::move(test_labels), k, true)};
}

}  // namespace oscal
