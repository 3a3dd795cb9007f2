#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "causet/errors.hpp"
#include "causet/evaluation.hpp"
#include "causet/synth.hpp"

using namespace causet;

namespace {

/// Recomputes every prefix from scratch.
std::vector<double> gain_oracle(const std::vector<double>& pred, const std::vector<double>& w,
                                const std::vector<double>& y) {
  const auto n = pred.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (pred[order[b]] > pred[order[a]] || (pred[order[b]] == pred[order[a]] && order[b] < order[a]))
        std::swap(order[a], order[b]);
  std::vector<double> gains;
  for (std::size_t k = 1; k <= n; ++k) {
    double st = 0, sc = 0;
    int nt = 0, nc = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto i = order[j];
      if (w[i] == 1.0) {
        st += y[i];
        ++nt;
      } else {
        sc += y[i];
        ++nc;
      }
    }
    gains.push_back(nt > 0 && nc > 0 ? (st / nt - sc / nc) * static_cast<double>(k) : 0.0);
  }
  return gains;
}

}  // namespace

TEST_CASE("mse") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(b, a) == 1.0);
  CHECK_THROWS_AS(mse(a, std::vector<double>{1}), DimensionMismatch);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> p(1 + gen() % 100), t(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = z(gen);
      t[i] = z(gen);
    }
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
    CHECK(std::fabs(mse(p, t) - s / p.size()) <= 1e-12);
  }
}

TEST_CASE("kl divergence") {
  std::vector<double> p{0.0, 1.0, 0.5, 0.25};
  CHECK(kl_divergence(p, p) < 1e-6);
  // two bins: P = (0.5, 0.5), Q = (0.25, 0.75)
  const std::vector<double> ps{0, 0, 1, 1}, qs{0, 1, 1, 1};
  CHECK(kl_divergence(ps, qs, 2) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-6));
  CHECK(kl_divergence(std::vector<double>{2, 2}, std::vector<double>{2}) == 0.0);
  CHECK(kl_divergence(ps, qs) >= 0.0);
  CHECK_THROWS_AS(kl_divergence(std::vector<double>{}, qs), InvalidArgument);
}

TEST_CASE("uplift worked example and prefix oracle") {
  const std::vector<double> w{1, 0, 1, 0}, y{2, 0, 1, 1}, pred{4, 3, 2, 1};
  const auto c = uplift_curve(pred, w, y);
  REQUIRE(c.points.size() == 4);
  CHECK(c.points[0].gain == 0.0);
  CHECK(c.points[1].gain == 4.0);
  CHECK(c.points[2].gain == doctest::Approx(4.5));
  CHECK(c.points[3].gain == doctest::Approx(4.0));
  CHECK(c.points.back().fraction == 1.0);
  // trapezoid over fractions k/n, divided by n
  const double area = 0.25 * ((0 + 4.0) / 2 + (4.0 + 4.5) / 2 + (4.5 + 4.0) / 2);
  CHECK(c.auuc == doctest::Approx(area / 4.0));

  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen() % 40;
    std::vector<double> pw(n), py(n), pp(n);
    for (std::size_t i = 0; i < n; ++i) {
      pw[i] = static_cast<double>(gen() % 2);
      py[i] = static_cast<double>(gen() % 10);
      pp[i] = static_cast<double>(gen() % 5);
    }
    pw[0] = 1;
    pw[1] = 0;
    const auto curve = uplift_curve(pp, pw, py);
    const auto expect = gain_oracle(pp, pw, py);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(curve.points[k].gain == doctest::Approx(expect[k]).epsilon(1e-12));
      if (k > 0) CHECK(curve.points[k].fraction > curve.points[k - 1].fraction);
    }
  }
}

TEST_CASE("uplift null outcome and errors") {
  std::vector<double> w{1, 0, 1, 0, 1}, y(5, 3.0), pred{5, 1, 4, 2, 3};
  for (const auto& p : uplift_curve(pred, w, y).points) CHECK(p.gain == 0.0);
  CHECK_THROWS_AS(uplift_curve(pred, std::vector<double>(5, 1.0), y), SingleClassError);
  CHECK_THROWS_AS(uplift_curve(pred, w, std::vector<double>{1}), DimensionMismatch);
}

TEST_CASE("oracle ranking on randomized data beats a random ranking") {
  // Randomized assignment with a heterogeneous effect; prefix means are then
  // unconfounded.
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    const std::size_t n = 4000;
    std::vector<double> tau(n), w(n), y(n), noise(n);
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] = 2.0 * u(gen);
      w[i] = static_cast<double>(gen() % 2);
      y[i] = z(gen) + w[i] * tau[i];
      noise[i] = u(gen);
    }
    if (uplift_curve(tau, w, y).auuc > uplift_curve(noise, w, y).auuc) ++wins;
  }
  CHECK(wins >= 9);
}

TEST_CASE("prediction scatter") {
  const std::vector<double> t{0, 1, 2, 3}, p{1, 3, 5, 7};
  const auto s = prediction_scatter(p, t);
  CHECK(s.slope == doctest::Approx(2.0));
  CHECK(s.intercept == doctest::Approx(1.0));
  CHECK(s.pairs[2] == std::pair<double, double>{2, 5});
  const auto flat = prediction_scatter(p, std::vector<double>(4, 1.0));
  CHECK(flat.slope == 0.0);
  CHECK(flat.intercept == doctest::Approx(4.0));
  CHECK(s.to_csv().starts_with("tau_true,ite_pred\n"));
}

TEST_CASE("moments") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(standard_deviation(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
}
