#include "causet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "causet/errors.hpp"
#include "causet/rng.hpp"

namespace causet {

SyntheticSet generate(std::size_t n, std::size_t p, double sigma, std::uint64_t seed) {
  if (n < 1) throw InvalidDimension("synthetic set needs n >= 1");
  if (p < 5) throw InvalidDimension("synthetic set needs p >= 5, got " + std::to_string(p));
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");

  CounterRng rng(seed);
  SyntheticSet s;
  s.seed = seed;
  s.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.x.cols(); ++j) s.x(i, j) = rng.uniform();
  }

  s.b_true.resize(n);
  s.e_true.resize(n);
  s.tau_true.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x0 = s.x(r, 0), x1 = s.x(r, 1), x2 = s.x(r, 2), x3 = s.x(r, 3), x4 = s.x(r, 4);
    const double wave = std::sin(std::numbers::pi * x0 * x1);
    s.b_true[i] = wave + 2.0 * (x2 - 0.5) * (x2 - 0.5) + x3 + 0.5 * x4;
    s.e_true[i] = std::clamp(wave, 0.1, 0.9);
    s.tau_true[i] = (x0 + x1) / 2.0;
  }

  s.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.w[i] = rng.bernoulli(s.e_true[i]) ? 1.0 : 0.0;

  s.y = noiseless_outcome(s, s.w);
  if (sigma > 0.0) {
    for (std::size_t i = 0; i < n; ++i) s.y[i] += sigma * rng.normal();
  }
  return s;
}

std::vector<double> noiseless_outcome(const SyntheticSet& set, const std::vector<double>& w) {
  if (w.size() != set.size()) throw DimensionMismatch("treatment vector length differs from n");
  std::vector<double> y(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    y[i] = set.b_true[i] + (w[i] - 0.5) * set.tau_true[i];
  }
  return y;
}

std::vector<std::string> SyntheticSet::covariate_names() const {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j));
  return names;
}

Frame SyntheticSet::to_frame() const {
  std::vector<Column> cols;
  const auto names = covariate_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto col = x.col(static_cast<Eigen::Index>(j));
    cols.push_back(Column::numeric(names[j], std::vector<double>(col.data(), col.data() + col.size())));
  }
  cols.push_back(Column::binary("w", w));
  cols.push_back(Column::numeric("y", y));
  cols.push_back(Column::numeric("tau_true", tau_true));
  cols.push_back(Column::numeric("e_true", e_true));
  cols.push_back(Column::numeric("b_true", b_true));
  return Frame(std::move(cols));
}

}  // namespace causet
