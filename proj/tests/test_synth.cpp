#include <doctest.h>

#include <cmath>
#include <numbers>

#include "causet/errors.hpp"
#include "causet/rng.hpp"
#include "causet/synth.hpp"

using namespace causet;

TEST_CASE("counter generator is splitmix64") {
  CounterRng rng(1234567);
  const std::uint64_t expect[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                  4593380528125082431ULL, 16408922859458223821ULL};
  for (auto v : expect) CHECK(rng.next_u64() == v);
}

TEST_CASE("derived variates") {
  CounterRng rng(5);
  double s = 0, s2 = 0, u_min = 1, u_max = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  CHECK(u_min >= 0.0);
  CHECK(u_max < 1.0);
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s / n) < 0.01);
  CHECK(std::fabs(s2 / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("shapes and formulas") {
  const auto s = generate(10000, 5, 1.0, 3);
  CHECK(s.x.rows() == 10000);
  CHECK(s.x.cols() == 5);
  CHECK(s.w.size() == 10000);
  CHECK(s.y.size() == 10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x0 = s.x(r, 0), x1 = s.x(r, 1), x2 = s.x(r, 2), x3 = s.x(r, 3), x4 = s.x(r, 4);
    CHECK(s.tau_true[i] == (x0 + x1) / 2.0);
    CHECK(s.e_true[i] >= 0.1);
    CHECK(s.e_true[i] <= 0.9);
    CHECK(s.e_true[i] == std::clamp(std::sin(std::numbers::pi * x0 * x1), 0.1, 0.9));
    CHECK(s.b_true[i] == doctest::Approx(std::sin(std::numbers::pi * x0 * x1) + 2.0 * (x2 - 0.5) * (x2 - 0.5) + x3 + 0.5 * x4).epsilon(1e-15));
    CHECK((s.w[i] == 0.0 || s.w[i] == 1.0));
  }
}

TEST_CASE("noiseless decomposition") {
  const auto s = generate(500, 6, 0.0, 4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.y[i] == s.b_true[i] + (s.w[i] - 0.5) * s.tau_true[i]);
  }
  std::vector<double> ones(s.size(), 1.0);
  const auto y1 = noiseless_outcome(s, ones);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(y1[i] == s.b_true[i] + 0.5 * s.tau_true[i]);
}

TEST_CASE("statistical properties over seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate(10000, 5, 1.0, seed);
    double tau = 0, e = 0, w = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      tau += s.tau_true[i];
      e += s.e_true[i];
      w += s.w[i];
    }
    tau /= s.size();
    e /= s.size();
    w /= s.size();
    CHECK(std::fabs(tau - 0.5) < 0.015);
    CHECK(std::fabs(w - e) < 3.0 * std::sqrt(e * (1 - e) / s.size()));
  }
}

TEST_CASE("determinism and frame layout") {
  const auto a = generate(300, 7, 1.0, 9);
  const auto b = generate(300, 7, 1.0, 9);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.w == b.w);
  CHECK(generate(300, 7, 1.0, 10).y != a.y);
  const auto f = a.to_frame();
  CHECK(f.names() == std::vector<std::string>{"x0", "x1", "x2", "x3", "x4", "x5", "x6", "w", "y", "tau_true", "e_true", "b_true"});
  CHECK(f.column("w").kind == ColumnKind::Binary);
  CHECK(parse_csv(format_csv(f)).numbers("y")[17] == a.y[17]);
}

TEST_CASE("dimension errors") {
  CHECK_THROWS_AS(generate(10, 4, 1.0, 0), InvalidDimension);
  CHECK_THROWS_AS(generate(0, 5, 1.0, 0), InvalidDimension);
  CHECK_THROWS_AS(generate(10, 5, -1.0, 0), InvalidArgument);
}
