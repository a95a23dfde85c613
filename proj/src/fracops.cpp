#include "tfsrc/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tfsrc/errors.hpp"

namespace tfsrc {

namespace {

// (j+1)^p - j^p without cancellation for large j.
double power_increment(std::size_t j, double p) {
  if (j == 0) return 1.0;
  const double x = static_cast<double>(j);
  return std::pow(x, p) * std::expm1(p * std::log1p(1.0 / x));
}

}  // namespace

double L1Weights::gamma(std::size_t j, std::size_t m) const {
  if (m >= d.size() || j > m + 1) {
    throw ValidationError("L1Weights::gamma: index out of range");
  }
  if (j == 0) return d[0];
  if (j == m + 1) return -d[m];
  return d[j] - d[j - 1];
}

L1Weights l1_weights(double alpha, double tau, std::size_t steps) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("l1_weights: alpha must lie in (0,1)");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ValidationError("l1_weights: tau must be positive");
  }
  if (steps == 0) throw ValidationError("l1_weights: need at least one step");

  L1Weights w;
  w.alpha = alpha;
  w.tau = tau;
  w.d.resize(steps);
  for (std::size_t j = 0; j < steps; ++j) w.d[j] = power_increment(j, 1.0 - alpha);
  w.b0 = std::tgamma(2.0 - alpha) * std::pow(tau, alpha);
  return w;
}

namespace {

void check_history(std::span<const double> history, const L1Weights& weights) {
  if (history.size() < 2) {
    throw ValidationError("caputo_l1: history needs at least two entries");
  }
  if (history.size() - 1 > weights.d.size()) {
    std::ostringstream os;
    os << "caputo_l1: history of length " << history.size() << " exceeds the "
       << weights.d.size() << " available weights";
    throw ValidationError(os.str());
  }
}

}  // namespace

double caputo_l1(std::span<const double> history, const L1Weights& weights) {
  check_history(history, weights);
  const std::size_t last = history.size() - 1;  // m + 1
  double acc = 0.0;
  for (std::size_t j = 0; j < last; ++j) {
    acc += weights.d[j] * (history[last - j] - history[last - j - 1]);
  }
  return acc / weights.b0;
}

double caputo_l1_gamma_form(std::span<const double> history, const L1Weights& weights) {
  check_history(history, weights);
  const std::size_t last = history.size() - 1;
  const std::size_t m = last - 1;
  double acc = 0.0;
  for (std::size_t j = 0; j <= last; ++j) acc += weights.gamma(j, m) * history[last - j];
  return acc / weights.b0;
}

double mittag_leffler(const MLParams& params, double z) {
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw ValidationError("mittag_leffler: alpha must lie in (0,1]");
  }
  if (!(params.beta > 0.0)) throw ValidationError("mittag_leffler: beta must be positive");
  if (!(params.series_tol > 0.0) || params.max_terms < 1) {
    throw ValidationError("mittag_leffler: series_tol > 0 and max_terms >= 1 required");
  }
  if (!std::isfinite(z)) throw ValidationError("mittag_leffler: non-finite argument");
  if (z == 0.0) return 1.0 / std::tgamma(params.beta);

  const double log_abs_z = std::log(std::abs(z));
  double sum = 0.0;
  double peak = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < params.max_terms; ++k) {
    const double arg = params.alpha * static_cast<double>(k) + params.beta;
    // 1/Gamma(arg) directly while it is representable, otherwise through lgamma.
    double magnitude;
    if (arg < 170.0) {
      magnitude = std::exp(static_cast<double>(k) * log_abs_z) / std::tgamma(arg);
    } else {
      magnitude = std::exp(static_cast<double>(k) * log_abs_z - std::lgamma(arg));
    }
    if (!std::isfinite(magnitude)) {
      throw NumericalError("mittag_leffler: series term overflow");
    }
    const double term = (z < 0.0 && (k % 2 == 1)) ? -magnitude : magnitude;
    sum += term;
    peak = std::max(peak, magnitude);
    // Stop only once terms are shrinking; early terms may be small before the peak.
    if (magnitude < previous && magnitude <= params.series_tol * std::max(1.0, std::abs(sum))) {
      if (peak * std::numeric_limits<double>::epsilon() > 1e-3 * std::abs(sum)) {
        std::ostringstream os;
        os << "mittag_leffler: catastrophic cancellation at z = " << z;
        throw NumericalError(os.str());
      }
      return sum;
    }
    previous = magnitude;
  }
  std::ostringstream os;
  os << "mittag_leffler: no convergence within " << params.max_terms << " terms at z = " << z;
  throw NumericalError(os.str());
}

std::vector<double> rl_integral_quadrature(std::span<const double> g, double tau, double alpha,
                                           RlDirection direction) {
  if (g.size() < 2) throw ValidationError("rl_integral_quadrature: need at least two samples");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("rl_integral_quadrature: alpha must lie in (0,1)");
  }
  if (!(tau > 0.0)) throw ValidationError("rl_integral_quadrature: tau must be positive");

  const std::size_t size = g.size();
  std::vector<double> samples(g.begin(), g.end());
  if (direction == RlDirection::backward) std::reverse(samples.begin(), samples.end());

  // Exact integration of (t_n - s)^{alpha-1} against the hat functions.
  const double ap1 = alpha + 1.0;
  auto p = [ap1](double x) { return std::pow(x, ap1); };
  const double scale = std::pow(tau, alpha) / std::tgamma(alpha + 2.0);

  std::vector<double> out(size, 0.0);
  for (std::size_t n = 1; n < size; ++n) {
    const double nn = static_cast<double>(n);
    double acc = (p(nn - 1.0) - (nn - ap1) * std::pow(nn, alpha)) * samples[0];
    for (std::size_t j = 1; j < n; ++j) {
      const double r = static_cast<double>(n - j);
      acc += (p(r + 1.0) - 2.0 * p(r) + p(r - 1.0)) * samples[j];
    }
    acc += samples[n];
    out[n] = scale * acc;
  }
  if (direction == RlDirection::backward) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace tfsrc
