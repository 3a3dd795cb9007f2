#include "causet/refutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "causet/errors.hpp"
#include "causet/evaluation.hpp"
#include "causet/rng.hpp"

namespace causet {

namespace {

constexpr double kStableChange = 0.10;
constexpr double kPlaceboShare = 0.25;

void check_options(const RefutationOptions& options) {
  if (options.repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
}

RefutationReport summarize(Refuter refuter, double original, std::vector<double> refuted,
                           const RefutationOptions& options) {
  RefutationReport r;
  r.refuter = refuter;
  r.original_effect = original;
  std::sort(refuted.begin(), refuted.end());
  r.refuted_effects = std::move(refuted);
  r.repetitions = options.repetitions;
  r.seed = options.seed;
  // Mean as an offset from the original so that unchanged replicates give it back exactly.
  double offset = 0.0;
  for (double v : r.refuted_effects) offset += v - original;
  r.mean_refuted = original + offset / static_cast<double>(r.refuted_effects.size());
  const double shift = std::abs(r.mean_refuted - original);
  if (original != 0.0) r.relative_change = shift / std::abs(original);
  else r.relative_change = shift == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (r.refuted_effects.size() >= 30) r.p_value = refutation_p_value(original, r.refuted_effects);

  switch (refuter) {
    case Refuter::RandomCommonCause:
    case Refuter::DataSubset:
      r.passed = r.relative_change < kStableChange;
      r.verdict_rule = "pass when relative_change < 0.10 (estimate stable); high p_value agrees";
      break;
    case Refuter::PlaceboTreatment:
      r.passed = std::abs(r.mean_refuted) < kPlaceboShare * std::abs(original);
      r.verdict_rule =
          "pass when |mean_refuted| < 0.25 |original_effect| (placebo effect near zero); "
          "low p_value agrees";
      break;
    case Refuter::UnobservedConfounder:
      r.verdict_rule = "informational: range of effects under the simulated confounder";
      break;
  }
  return r;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::string fresh_name(const Frame& frame, std::string base) {
  while (frame.has(base)) base += "_";
  return base;
}

}  // namespace

std::string_view to_string(Refuter refuter) {
  switch (refuter) {
    case Refuter::RandomCommonCause: return "random_common_cause";
    case Refuter::PlaceboTreatment: return "placebo_treatment";
    case Refuter::DataSubset: return "data_subset";
    case Refuter::UnobservedConfounder: return "unobserved_confounder";
  }
  return "placebo_treatment";
}

Refuter parse_refuter(std::string_view text) {
  if (text == "random_common_cause") return Refuter::RandomCommonCause;
  if (text == "placebo_treatment") return Refuter::PlaceboTreatment;
  if (text == "data_subset") return Refuter::DataSubset;
  if (text == "unobserved_confounder") return Refuter::UnobservedConfounder;
  throw InvalidArgument("unknown refuter '" + std::string(text) + "'");
}

nlohmann::json RefutationReport::to_json() const {
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  return {{"refuter", std::string(to_string(refuter))},
          {"original_effect", original_effect},
          {"mean_refuted", mean_refuted},
          {"min_refuted", refuted_effects.front()},
          {"max_refuted", refuted_effects.back()},
          {"relative_change", finite_or_null(relative_change)},
          {"p_value", p_value ? nlohmann::json(*p_value) : nlohmann::json(nullptr)},
          {"repetitions", repetitions},
          {"seed", seed},
          {"passed", passed ? nlohmann::json(*passed) : nlohmann::json(nullptr)},
          {"verdict_rule", verdict_rule},
          {"refuted_effects", refuted_effects}};
}

double refutation_p_value(double original, const std::vector<double>& refuted) {
  if (refuted.size() < 30) throw InvalidArgument("p-value needs at least 30 refuted effects");
  const double m = mean(refuted);
  const double sd = standard_deviation(refuted);
  if (!(sd > 0.0)) return original == m ? 1.0 : 0.0;
  const double z = std::abs(original - m) / sd;
  return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

RefutationReport refute_random_common_cause(const Estimator& estimator, const Frame& frame,
                                            const EstimationTask& task,
                                            const RefutationOptions& options) {
  check_options(options);
  const double original = estimator(frame, task);
  const auto name = fresh_name(frame, "random_common_cause");
  std::vector<double> refuted;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    CounterRng rng(derive_seed(options.seed, static_cast<std::uint64_t>(rep)));
    std::vector<double> noise(frame.rows());
    for (auto& v : noise) v = rng.normal();
    auto modified = task;
    modified.adjustment.push_back(name);
    refuted.push_back(estimator(frame.with_column(Column::numeric(name, std::move(noise))), modified));
  }
  return summarize(Refuter::RandomCommonCause, original, std::move(refuted), options);
}

RefutationReport refute_placebo(const Estimator& estimator, const Frame& frame,
                                const EstimationTask& task, const RefutationOptions& options) {
  check_options(options);
  const double original = estimator(frame, task);
  const auto t = binary_values(frame, task.treatment);
  const double prevalence = mean(t);
  std::vector<double> refuted;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    CounterRng rng(derive_seed(options.seed, static_cast<std::uint64_t>(rep)));
    std::vector<double> placebo(frame.rows());
    for (auto& v : placebo) v = rng.bernoulli(prevalence) ? 1.0 : 0.0;
    refuted.push_back(
        estimator(frame.with_column(Column::binary(task.treatment, std::move(placebo))), task));
  }
  return summarize(Refuter::PlaceboTreatment, original, std::move(refuted), options);
}

RefutationReport refute_subset(const Estimator& estimator, const Frame& frame,
                               const EstimationTask& task, double fraction,
                               const RefutationOptions& options) {
  check_options(options);
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("subset fraction must lie in (0, 1)");
  const double original = estimator(frame, task);
  const auto n = frame.rows();
  const auto m = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  std::vector<double> refuted;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    CounterRng rng(derive_seed(options.seed, static_cast<std::uint64_t>(rep)));
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) std::swap(rows[i], rows[i + rng.below(n - i)]);
    rows.resize(m);
    std::sort(rows.begin(), rows.end());
    refuted.push_back(estimator(frame.select_rows(rows), task));
  }
  return summarize(Refuter::DataSubset, original, std::move(refuted), options);
}

RefutationReport refute_unobserved_confounder(const Estimator& estimator, const Frame& frame,
                                              const EstimationTask& task, double strength_t,
                                              double strength_y,
                                              const RefutationOptions& options) {
  check_options(options);
  if (!(strength_t >= 0.0 && strength_t < 1.0) || !(strength_y >= 0.0 && strength_y < 1.0)) {
    throw InvalidArgument("confounder strengths must lie in [0, 1)");
  }
  const double original = estimator(frame, task);
  const auto t = binary_values(frame, task.treatment);
  const auto y = complete_values(frame, task.outcome);
  const double prevalence = mean(t);
  if (prevalence == 0.0 || prevalence == 1.0) {
    throw SingleClassError("treatment '" + task.treatment + "' has only one arm");
  }
  const double base = logit(prevalence);

  std::vector<double> refuted;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    if (strength_y == 0.0) {
      // The outcome is unchanged, so the perturbed frame is the input frame.
      refuted.push_back(estimator(frame, task));
      continue;
    }
    CounterRng rng(derive_seed(options.seed, static_cast<std::uint64_t>(rep)));
    std::vector<double> shifted(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      double u;
      while (true) {
        u = rng.normal();
        const double p1 = sigmoid(base + strength_t * u);
        if (rng.uniform() < (t[i] == 1.0 ? p1 : 1.0 - p1)) break;
      }
      shifted[i] = y[i] + strength_y * u;
    }
    refuted.push_back(
        estimator(frame.with_column(Column::numeric(task.outcome, std::move(shifted))), task));
  }
  return summarize(Refuter::UnobservedConfounder, original, std::move(refuted), options);
}

}  // namespace causet
