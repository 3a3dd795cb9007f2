#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causet/frame.hpp"

namespace causet {

/// Column roles handed to an estimation procedure.
struct EstimationTask {
  std::string treatment;
  std::string outcome;
  std::vector<std::string> adjustment;
};

/// A re-runnable estimation procedure returning a scalar effect.
using Estimator = std::function<double(const Frame&, const EstimationTask&)>;

enum class Refuter { RandomCommonCause, PlaceboTreatment, DataSubset, UnobservedConfounder };

std::string_view to_string(Refuter refuter);
Refuter parse_refuter(std::string_view text);

struct RefutationReport {
  Refuter refuter = Refuter::PlaceboTreatment;
  double original_effect = 0.0;
  std::vector<double> refuted_effects;  // sorted ascending
  double mean_refuted = 0.0;
  double relative_change = 0.0;
  /// Present when repetitions >= 30.
  std::optional<double> p_value;
  int repetitions = 0;
  std::uint64_t seed = 0;
  /// Verdict under `verdict_rule`; absent for purely informational refuters.
  std::optional<bool> passed;
  std::string verdict_rule;

  double min_refuted() const { return refuted_effects.front(); }
  double max_refuted() const { return refuted_effects.back(); }

  nlohmann::json to_json() const;
};

struct RefutationOptions {
  int repetitions = 100;
  std::uint64_t seed = 0;
};

/// Adds an independent N(0,1) column to the adjustment set per repetition.
RefutationReport refute_random_common_cause(const Estimator& estimator, const Frame& frame,
                                            const EstimationTask& task,
                                            const RefutationOptions& options = {});

/// Replaces the treatment with an independent Bernoulli(mean(t)) column.
RefutationReport refute_placebo(const Estimator& estimator, const Frame& frame,
                                const EstimationTask& task,
                                const RefutationOptions& options = {});

/// Re-estimates on uniform row subsamples of size ceil(fraction * n).
RefutationReport refute_subset(const Estimator& estimator, const Frame& frame,
                               const EstimationTask& task, double fraction = 0.8,
                               const RefutationOptions& options = {});

/// Simulates a latent confounder u ~ N(0,1) whose effect on treatment is a
/// logit shift of strength_t * u and on the outcome an additive
/// strength_y * u, then re-estimates without conditioning on u.
///
/// Treatment labels are kept: u is drawn from its conditional law given the
/// observed t under the tilted assignment model P(t = 1 | u) =
/// sigmoid(logit(mean t) + strength_t * u), by rejection sampling. Only the
/// outcome column changes; with strength_y = 0 the frame is untouched.
RefutationReport refute_unobserved_confounder(const Estimator& estimator, const Frame& frame,
                                              const EstimationTask& task, double strength_t,
                                              double strength_y,
                                              const RefutationOptions& options = {});

/// Two-sided tail probability of `original` under a normal fitted to
/// `refuted` (sample mean and standard deviation). Zero spread gives 1 when
/// `original` equals the constant and 0 otherwise. Throws InvalidArgument
/// with fewer than 30 values.
double refutation_p_value(double original, const std::vector<double>& refuted);

}  // namespace causet
