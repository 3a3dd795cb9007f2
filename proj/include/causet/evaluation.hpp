#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace causet {

/// Mean squared difference. Throws DimensionMismatch (unequal or empty).
double mse(std::span<const double> pred, std::span<const double> truth);

/// KL(P || Q) between histograms of the two samples over their common range
/// with `bins` equal-width bins. Each bin probability gets `alpha` added before
/// renormalising. Returns 0 when every value in both samples is identical.
/// Throws InvalidArgument on empty samples or bins < 1.
double kl_divergence(std::span<const double> p_sample, std::span<const double> q_sample,
                     int bins = 50, double alpha = 1e-9);

struct UpliftPoint {
  double fraction = 0.0;  // k / n
  double gain = 0.0;      // (treated mean - control mean) over the top-k prefix, times k
};

struct UpliftCurve {
  std::vector<UpliftPoint> points;  // k = 1..n
  /// Trapezoidal area under gain vs fraction, divided by n.
  double auuc = 0.0;

  std::string to_csv() const;
};

/// Units ranked by predicted effect, descending (ties by row index). The gain
/// of a prefix is 0 until both arms appear in it.
/// Throws DimensionMismatch, SingleClassError, InvalidArgument (non-binary w).
UpliftCurve uplift_curve(std::span<const double> ite_pred, std::span<const double> w,
                         std::span<const double> y);

struct PredictionScatter {
  std::vector<std::pair<double, double>> pairs;  // (true, predicted)
  double slope = 0.0;
  double intercept = 0.0;

  std::string to_csv() const;
};

/// Raw (true, predicted) pairs plus the OLS line predicted ~ true. A constant
/// `tau_true` has no defined slope; slope is then 0 and intercept the mean
/// prediction. Throws DimensionMismatch.
PredictionScatter prediction_scatter(std::span<const double> ite_pred,
                                     std::span<const double> tau_true);

double mean(std::span<const double> values);
double standard_deviation(std::span<const double> values);

}  // namespace causet
