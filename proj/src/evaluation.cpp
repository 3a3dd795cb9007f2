#include "causet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "causet/errors.hpp"
#include "causet/frame.hpp"

namespace causet {

namespace {

// Mean anchored at the first element, so a constant vector has exactly its
// value as mean.
double anchored_mean(std::span<const double> v) {
  const double anchor = v.front();
  double acc = 0.0;
  for (double x : v) acc += x - anchor;
  return anchor + acc / static_cast<double>(v.size());
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_deviation(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double mse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw DimensionMismatch("mse needs equal, non-empty vectors");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double kl_divergence(std::span<const double> p_sample, std::span<const double> q_sample, int bins,
                     double alpha) {
  if (p_sample.empty() || q_sample.empty()) throw InvalidArgument("kl_divergence needs non-empty samples");
  if (bins < 1) throw InvalidArgument("bins must be >= 1");
  const auto [p_lo, p_hi] = std::minmax_element(p_sample.begin(), p_sample.end());
  const auto [q_lo, q_hi] = std::minmax_element(q_sample.begin(), q_sample.end());
  const double lo = std::min(*p_lo, *q_lo);
  const double hi = std::max(*p_hi, *q_hi);
  if (!(hi > lo)) return 0.0;

  const auto nb = static_cast<std::size_t>(bins);
  auto histogram = [&](std::span<const double> sample) {
    std::vector<double> counts(nb, 0.0);
    for (double v : sample) {
      auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
      counts[std::min(b, nb - 1)] += 1.0;
    }
    const double norm = 1.0 + alpha * static_cast<double>(bins);
    for (auto& c : counts) c = (c / static_cast<double>(sample.size()) + alpha) / norm;
    return counts;
  };
  const auto p = histogram(p_sample);
  const auto q = histogram(q_sample);
  double kl = 0.0;
  for (std::size_t b = 0; b < nb; ++b) kl += p[b] * std::log(p[b] / q[b]);
  return std::max(0.0, kl);
}

UpliftCurve uplift_curve(std::span<const double> ite_pred, std::span<const double> w,
                         std::span<const double> y) {
  const auto n = ite_pred.size();
  if (w.size() != n || y.size() != n || n == 0) {
    throw DimensionMismatch("uplift_curve needs equal, non-empty vectors");
  }
  bool any_treated = false, any_control = false;
  for (double v : w) {
    if (v != 0.0 && v != 1.0) throw InvalidArgument("treatment must be 0/1");
    (v == 1.0 ? any_treated : any_control) = true;
  }
  if (!any_treated || !any_control) throw SingleClassError("uplift_curve needs both arms");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return ite_pred[a] > ite_pred[b]; });

  UpliftCurve curve;
  curve.points.reserve(n);
  double treated_sum = 0.0, control_sum = 0.0;
  std::size_t treated = 0, control = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto i = order[k - 1];
    if (w[i] == 1.0) {
      treated_sum += y[i];
      ++treated;
    } else {
      control_sum += y[i];
      ++control;
    }
    double gain = 0.0;
    if (treated > 0 && control > 0) {
      gain = (treated_sum / static_cast<double>(treated) - control_sum / static_cast<double>(control)) *
             static_cast<double>(k);
    }
    curve.points.push_back({static_cast<double>(k) / static_cast<double>(n), gain});
  }
  double area = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    area += 0.5 * (a.gain + b.gain) * (b.fraction - a.fraction);
  }
  curve.auuc = area / static_cast<double>(n);
  return curve;
}

std::string UpliftCurve::to_csv() const {
  std::ostringstream out;
  out << "fraction,gain\n";
  for (const auto& p : points) out << format_number(p.fraction) << ',' << format_number(p.gain) << '\n';
  return out.str();
}

PredictionScatter prediction_scatter(std::span<const double> ite_pred,
                                     std::span<const double> tau_true) {
  if (ite_pred.size() != tau_true.size() || ite_pred.empty()) {
    throw DimensionMismatch("prediction_scatter needs equal, non-empty vectors");
  }
  PredictionScatter s;
  s.pairs.reserve(ite_pred.size());
  for (std::size_t i = 0; i < ite_pred.size(); ++i) s.pairs.emplace_back(tau_true[i], ite_pred[i]);

  const double mx = anchored_mean(tau_true);
  const double my = anchored_mean(ite_pred);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ite_pred.size(); ++i) {
    const double dx = tau_true[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ite_pred[i] - my);
  }
  s.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  s.intercept = my - s.slope * mx;
  return s;
}

std::string PredictionScatter::to_csv() const {
  std::ostringstream out;
  out << "tau_true,ite_pred\n";
  for (const auto& [t, p] : pairs) out << format_number(t) << ',' << format_number(p) << '\n';
  return out.str();
}

}  // namespace causet
