#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "causet/frame.hpp"

namespace causet {

/// Synthetic population with a hard nuisance and an easy effect:
///
///   X ~ U(0,1)^{n x p}
///   b   = sin(pi X0 X1) + 2 (X2 - 0.5)^2 + X3 + 0.5 X4
///   e   = clip(sin(pi X0 X1), 0.1, 0.9)
///   tau = (X0 + X1) / 2
///   w ~ Bernoulli(e)
///   y   = b + (w - 0.5) tau + sigma N(0,1)
struct SyntheticSet {
  Eigen::MatrixXd x;
  std::vector<double> w;
  std::vector<double> y;
  std::vector<double> tau_true;
  std::vector<double> e_true;
  std::vector<double> b_true;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return w.size(); }
  std::size_t features() const noexcept { return static_cast<std::size_t>(x.cols()); }

  /// Columns x0..x{p-1}, w, y, tau_true, e_true, b_true.
  Frame to_frame() const;
  /// Covariate names x0..x{p-1}.
  std::vector<std::string> covariate_names() const;
};

/// Deterministic per (n, p, sigma, seed). Draw order from one CounterRng:
/// X row-major, then w, then the noise. Throws InvalidDimension (n < 1, p < 5),
/// InvalidArgument (sigma < 0).
SyntheticSet generate(std::size_t n = 10000, std::size_t p = 5, double sigma = 1.0,
                      std::uint64_t seed = 0);

/// Outcome with the treatment vector overridden and no noise:
/// b + (w - 0.5) tau.
std::vector<double> noiseless_outcome(const SyntheticSet& set, const std::vector<double>& w);

}  // namespace causet
