#pragma once

#include <cstdint>

#include "oscal/matrix.hpp"

namespace oscal {

/// Gaussian mixture with known ground-truth calibration. Known class j lives
/// at separation * e_j in R^dim; each unknown class sits at the midpoint of
/// two random known means plus an orthogonal offset of length separation/2,
/// which makes unknowns look like plausible blends of knowns. Logits are the
/// true Bayes log-posteriors (up to a per-row constant) scaled by miscal, so
/// miscal = 1 is exactly calibrated and miscal > 1 is overconfident.
struct SynthConfig {
  std::int64_t num_known = 6;
  std::int64_t num_unknown = 4;
  std::int64_t per_class = 2000;  // per class, for train+val and again for test
  std::int64_t dim = 8;           // >= num_known
  double separation = 4.0;
  double sigma = 1.0;
  double miscal = 3.0;  // logit multiplier c
  std::uint64_t seed = 42;
  std::int64_t run_index = 0;
};

struct SynthDataset {
  Matrix train_logits;
  LabelVector train_labels;
  Matrix val_logits;  // the reserved 10% of training data
  LabelVector val_labels;
  Matrix test_logits;  // knowns and unknowns; unknown labels = num_known
  LabelVector test_labels;
};

/// Deterministic in (seed, run_index): the same config yields bit-identical
/// arrays. Train/val cover the known classes only; the last 10% of each
/// class's training draw is the validation reserve. The test set draws
/// per_class fresh samples from every known and unknown class.
SynthDataset synth_generate(const SynthConfig& config);

}  // namespace oscal
