#include <doctest.h>

#include <cmath>
#include <random>

#include "causet/errors.hpp"
#include "causet/estimators.hpp"
#include "causet/refutation.hpp"
#include "causet/synth.hpp"

using namespace causet;

namespace {

double regression(const Frame& f, const EstimationTask& t) {
  return regression_adjustment(f, t.treatment, t.outcome, t.adjustment).value;
}

double diff_in_means(const Frame& f, const EstimationTask& t) {
  return regression_adjustment(f, t.treatment, t.outcome, {}).value;
}

struct Fixture {
  Frame frame;
  EstimationTask task;
};

Fixture synth_fixture(std::size_t n, std::uint64_t seed) {
  const auto set = generate(n, 5, 1.0, seed);
  return {set.to_frame(), {"w", "y", set.covariate_names()}};
}

}  // namespace

TEST_CASE("random common cause") {
  const auto fx = synth_fixture(3000, 1);
  const RefutationOptions opt{40, 9};
  const auto r = refute_random_common_cause(regression, fx.frame, fx.task, opt);
  CHECK(r.refuted_effects.size() == 40);
  CHECK(r.relative_change < 0.10);
  CHECK(r.passed == true);
  CHECK(std::is_sorted(r.refuted_effects.begin(), r.refuted_effects.end()));
  const auto again = refute_random_common_cause(regression, fx.frame, fx.task, opt);
  CHECK(again.refuted_effects == r.refuted_effects);

  const auto ignore = refute_random_common_cause(diff_in_means, fx.frame, fx.task, opt);
  CHECK(ignore.relative_change == 0.0);
}

TEST_CASE("placebo moves the estimate towards zero") {
  const auto fx = synth_fixture(3000, 2);
  const auto r = refute_placebo(regression, fx.frame, fx.task, {50, 3});
  CHECK(std::fabs(r.mean_refuted) < 0.25 * std::fabs(r.original_effect));
  CHECK(r.passed == true);
  REQUIRE(r.p_value);
  CHECK(*r.p_value >= 0.0);
  CHECK(*r.p_value <= 1.0);
}

TEST_CASE("placebo on pure noise") {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> t(4000), y(4000);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(gen() % 2);
    y[i] = z(gen);
  }
  const Frame f({Column::binary("t", t), Column::numeric("y", y)});
  const auto r = refute_placebo(diff_in_means, f, {"t", "y", {}}, {30, 1});
  CHECK(std::fabs(r.original_effect) < 0.1);
  CHECK(std::fabs(r.mean_refuted) < 0.1);
}

TEST_CASE("placebo treatment is independent of the original") {
  const auto set = generate(20000, 5, 1.0, 8);
  const auto frame = set.to_frame();
  const auto original = binary_values(frame, "w");
  double worst_p = 1.0;
  Estimator probe = [&](const Frame& f, const EstimationTask& task) {
    const auto placebo = binary_values(f, task.treatment);
    if (placebo == original) return 0.0;  // the unperturbed estimate
    double c[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < placebo.size(); ++i) c[static_cast<int>(original[i])][static_cast<int>(placebo[i])] += 1;
    const double n = static_cast<double>(placebo.size());
    double chi = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double expect = (c[a][0] + c[a][1]) * (c[0][b] + c[1][b]) / n;
        chi += (c[a][b] - expect) * (c[a][b] - expect) / expect;
      }
    const double p = std::erfc(std::sqrt(chi / 2.0));  // chi-square, 1 dof
    worst_p = std::min(worst_p, p);
    return 0.0;
  };
  const auto r = refute_placebo(probe, frame, {"w", "y", {}}, {5, 77});
  CHECK(r.repetitions == 5);
  CHECK(worst_p > 0.01);
}

TEST_CASE("data subset") {
  const auto fx = synth_fixture(3000, 4);
  const auto r = refute_subset(regression, fx.frame, fx.task, 0.8, {40, 2});
  CHECK(r.relative_change < 0.10);
  const auto near = refute_subset(regression, fx.frame, fx.task, 0.999, {30, 2});
  CHECK(near.relative_change < 0.01);
  CHECK_THROWS_AS(refute_subset(regression, fx.frame, fx.task, 1.0, {30, 2}), InvalidArgument);

  const auto small = synth_fixture(1000, 5);
  const auto large = synth_fixture(10000, 5);
  const auto rs = refute_subset(regression, small.frame, small.task, 0.8, {30, 6});
  const auto rl = refute_subset(regression, large.frame, large.task, 0.8, {30, 6});
  auto sd = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
  };
  CHECK(sd(rl.refuted_effects) < sd(rs.refuted_effects));
}

TEST_CASE("refuters never modify the input frame") {
  const auto fx = synth_fixture(500, 3);
  const auto copy = fx.frame;
  refute_subset(regression, fx.frame, fx.task, 0.5, {5, 1});
  refute_placebo(regression, fx.frame, fx.task, {5, 1});
  refute_random_common_cause(regression, fx.frame, fx.task, {5, 1});
  refute_unobserved_confounder(regression, fx.frame, fx.task, 0.5, 0.5, {5, 1});
  CHECK(fx.frame == copy);
}

TEST_CASE("unobserved confounder") {
  const auto fx = synth_fixture(3000, 7);
  const auto zero = refute_unobserved_confounder(regression, fx.frame, fx.task, 0.0, 0.0, {30, 5});
  for (double v : zero.refuted_effects) CHECK(v == zero.original_effect);
  CHECK(zero.relative_change == 0.0);
  CHECK_FALSE(zero.passed.has_value());

  const auto half = refute_unobserved_confounder(regression, fx.frame, fx.task, 0.5, 0.5, {30, 5});
  CHECK(half.relative_change >= 0.02);
  CHECK(half.relative_change <= 0.5);

  double last = -1.0;
  for (double sy : {0.1, 0.3, 0.6}) {
    const auto r = refute_unobserved_confounder(regression, fx.frame, fx.task, 0.5, sy, {30, 5});
    CHECK(r.relative_change >= last);
    last = r.relative_change;
  }
  CHECK_THROWS_AS(refute_unobserved_confounder(regression, fx.frame, fx.task, 1.0, 0.1, {30, 5}), InvalidArgument);
}

TEST_CASE("p-value") {
  CHECK(refutation_p_value(2.0, std::vector<double>(30, 2.0)) == 1.0);
  CHECK(refutation_p_value(2.5, std::vector<double>(30, 2.0)) == 0.0);
  CHECK_THROWS_AS(refutation_p_value(1.0, std::vector<double>(29, 1.0)), InvalidArgument);

  std::vector<double> v;
  for (int i = 0; i < 40; ++i) v.push_back(i % 2 == 0 ? -1.0 : 1.0);
  double m = 0, s = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  const double sd = std::sqrt(s / (v.size() - 1));
  CHECK(refutation_p_value(m + 10.0 * sd, v) < 1e-6);

  // Monte-Carlo oracle: tail frequency of a normal with the sample moments.
  std::mt19937_64 gen(99);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> r(100);
    for (auto& x : r) x = 0.3 + 0.2 * z(gen);
    double mu = 0, ss = 0;
    for (double x : r) mu += x;
    mu /= r.size();
    for (double x : r) ss += (x - mu) * (x - mu);
    const double sigma = std::sqrt(ss / (r.size() - 1));
    const double original = 0.3 + 0.1 * rep;
    int extreme = 0;
    const int draws = 200000;
    for (int k = 0; k < draws; ++k) {
      if (std::fabs(z(gen) * sigma) >= std::fabs(original - mu)) ++extreme;
    }
    CHECK(std::fabs(refutation_p_value(original, r) - static_cast<double>(extreme) / draws) < 0.02);
  }
}

TEST_CASE("names and json") {
  for (auto r : {Refuter::RandomCommonCause, Refuter::PlaceboTreatment, Refuter::DataSubset, Refuter::UnobservedConfounder}) {
    CHECK(parse_refuter(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_refuter("bootstrap"), InvalidArgument);
  const auto fx = synth_fixture(400, 1);
  const auto j = refute_subset(regression, fx.frame, fx.task, 0.8, {30, 2}).to_json();
  CHECK(j.at("refuter") == "data_subset");
  CHECK(j.at("refuted_effects").size() == 30);
  CHECK(j.contains("verdict_rule"));
}
