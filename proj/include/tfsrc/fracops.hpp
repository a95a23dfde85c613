#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfsrc {

/// Weights of the L1 discretization of the Caputo derivative on a uniform grid.
///
/// d[j] = (j+1)^{1-alpha} - j^{1-alpha} for j = 0..M-1, and
/// b0 = Gamma(2-alpha) * tau^alpha, so that
///   caputo(u)(t_{m+1}) ~ (1/b0) * sum_{j=0}^{m} d[j] * (u^{m+1-j} - u^{m-j}).
struct L1Weights {
  double alpha = 0.5;
  double tau = 1.0;
  std::vector<double> d;
  double b0 = 1.0;

  /// Convolution coefficient gamma_j of the expanded form
  /// sum_{j=0}^{m+1} gamma_j u^{m+1-j}; derived from d, not stored.
  /// Requires j <= m + 1 and m < d.size().
  double gamma(std::size_t j, std::size_t m) const;
};

L1Weights l1_weights(double alpha, double tau, std::size_t steps);

/// Discrete Caputo derivative at the last entry of `history` (u^0..u^{m+1}).
double caputo_l1(std::span<const double> history, const L1Weights& weights);

/// Same operator evaluated through the gamma coefficients.
double caputo_l1_gamma_form(std::span<const double> history, const L1Weights& weights);

struct MLParams {
  double alpha = 0.5;
  double beta = 1.0;
  double series_tol = 1e-16;
  std::size_t max_terms = 1000;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z by
/// direct power series. Throws NumericalError when the series does not
/// settle within max_terms or loses all significant digits to cancellation.
double mittag_leffler(const MLParams& params, double z);

enum class RlDirection { forward, backward };

/// Product-integration quadrature of the Riemann-Liouville integrals
///   forward:  J_{0+}^alpha g(t) = 1/Gamma(alpha) int_0^t (t-s)^{alpha-1} g(s) ds
///   backward: J_{T-}^alpha g(t) = 1/Gamma(alpha) int_t^T (s-t)^{alpha-1} g(s) ds
/// with g replaced by its piecewise-linear interpolant on the uniform grid of
/// spacing tau. Returns values at every grid node.
std::vector<double> rl_integral_quadrature(std::span<const double> g, double tau, double alpha,
                                           RlDirection direction);

}  // namespace tfsrc
