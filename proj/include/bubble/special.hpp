#ifndef BUBBLE_SPECIAL_HPP_
#define BUBBLE_SPECIAL_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bubble
{

/**
 * @brief Scaled complementary error function erfcx(z) = exp(z^2) erfc(z).
 *
 * Below z = 12 the product is formed directly; std::erfc keeps full relative
 * accuracy there and exp(z^2) stays far from overflow. Above that the
 * Laplace continued fraction converges in a handful of terms. For negative z
 * the reflection erfcx(-z) = 2 exp(z^2) - erfcx(z) is used, which overflows
 * past z ~ -26.6 exactly as the true function does.
 */
inline double erfcx(double z) noexcept
{
  if (std::isnan(z)) { return z; }
  if (z < 0.0) {
    if (z < -26.6) { return std::numeric_limits<double>::infinity(); }
    return 2.0 * std::exp(z * z) - erfcx(-z);
  }
  if (z < 12.0) { return std::exp(z * z) * std::erfc(z); }

  // erfcx(z) = 1/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), modified Lentz
  constexpr double tiny = 1e-300;
  double f = z;
  double C = f;
  double D = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double a = 0.5 * k;
    D = z + a * D;
    if (std::abs(D) < tiny) { D = tiny; }
    C = z + a / C;
    if (std::abs(C) < tiny) { C = tiny; }
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) { break; }
  }
  return std::numbers::inv_sqrtpi / f;
}

/// Standard normal distribution function.
inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) noexcept
{
  if (a == -std::numeric_limits<double>::infinity()) { return b; }
  if (b == -std::numeric_limits<double>::infinity()) { return a; }
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 + exp(s)).
inline double softplus(double s) noexcept
{
  if (s > 35.0) { return s + std::exp(-s); }
  return std::log1p(std::exp(s));
}

/// Normalised sinc, sin(pi w)/(pi w), with sinc(0) = 1.
inline double sinc_pi(double w) noexcept
{
  const double pw = std::numbers::pi * w;
  if (std::abs(pw) < 1e-5) { return 1.0 - pw * pw / 6.0; }
  return std::sin(pw) / pw;
}

/**
 * @brief Downward first-passage density of standard Brownian motion from
 * x > 0 to the origin, p0(t) = x / sqrt(2 pi) t^{-3/2} exp(-x^2 / 2t).
 */
inline double brownian_fpt_density(double t, double x) noexcept
{
  if (t <= 0.0) { return 0.0; }
  return x / std::sqrt(2.0 * std::numbers::pi) * std::pow(t, -1.5) * std::exp(-x * x / (2.0 * t));
}

}  // namespace bubble

#endif  // BUBBLE_SPECIAL_HPP_
