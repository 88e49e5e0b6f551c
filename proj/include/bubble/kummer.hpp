#ifndef BUBBLE_KUMMER_HPP_
#define BUBBLE_KUMMER_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include "bubble/error.hpp"

namespace bubble
{

/// value = mantissa * exp(log_scale); keeps M(m, n, psi) representable for large psi.
struct ScaledValue
{
  double mantissa{0.0};
  double log_scale{0.0};

  double value() const noexcept { return mantissa * std::exp(log_scale); }
  double log_abs() const noexcept { return std::log(std::abs(mantissa)) + log_scale; }
};

namespace detail
{

inline constexpr std::size_t kummer_max_terms = 10000;

inline bool is_nonpositive_integer(double n) noexcept { return n <= 0.0 && n == std::floor(n); }

/**
 * Series sum_k (m)_k / ((n)_k k!) psi^k with the partial sum renormalised
 * whenever it grows past 1e100, so the terms never overflow.
 */
inline ScaledValue kummer_series(double m, double n, double psi)
{
  ScaledValue out{1.0, 0.0};
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 0; k < kummer_max_terms; ++k) {
    const double kd = static_cast<double>(k);
    term *= (m + kd) / ((n + kd) * (kd + 1.0)) * psi;
    sum += term;
    if (std::abs(sum) > 1e100) {
      const double factor = std::abs(sum);
      sum /= factor;
      term /= factor;
      out.log_scale += std::log(factor);
    }
    // past the peak the terms shrink geometrically
    const bool decreasing = std::abs((m + kd + 1.0) * psi) < std::abs((n + kd + 1.0) * (kd + 2.0));
    if (term == 0.0 || (decreasing && std::abs(term) <= 1e-17 * std::abs(sum))) {
      out.mantissa = sum;
      return out;
    }
  }
  throw Error(ErrorKind::numerical, "Kummer series did not converge within 10000 terms");
}

}  // namespace detail

/**
 * @brief Confluent hypergeometric function M(m, n, psi) in scaled form.
 *
 * psi >= 0 sums the defining series directly; for m >= 0 every term is
 * positive, so no cancellation occurs at any size of psi. psi < 0 uses
 * M(m, n, psi) = e^psi M(n - m, n, -psi), whose series is positive-term when
 * n >= m.
 */
inline ScaledValue kummer_m_scaled(double m, double n, double psi)
{
  detail::require(std::isfinite(m) && std::isfinite(n) && std::isfinite(psi), ErrorKind::domain,
                  "Kummer M arguments must be finite");
  detail::require(!detail::is_nonpositive_integer(n), ErrorKind::domain,
                  "Kummer M is undefined for n a nonpositive integer");
  if (psi == 0.0 || m == 0.0) { return {1.0, 0.0}; }
  if (psi < 0.0) {
    ScaledValue out = detail::kummer_series(n - m, n, -psi);
    out.log_scale += psi;
    return out;
  }
  return detail::kummer_series(m, n, psi);
}

inline double kummer_m(double m, double n, double psi)
{
  const ScaledValue v = kummer_m_scaled(m, n, psi);
  const double out = v.value();
  detail::require(std::isfinite(out), ErrorKind::numerical, "Kummer M overflows double precision");
  return out;
}

/// ln M(m, n, psi) for arguments where M > 0 (in particular m >= 0, n > 0, psi >= 0).
inline double log_kummer_m(double m, double n, double psi)
{
  const ScaledValue v = kummer_m_scaled(m, n, psi);
  detail::require(v.mantissa > 0.0, ErrorKind::domain, "log of a nonpositive Kummer M value");
  return v.log_abs();
}

/// Direct series for complex parameters and moderate real psi, used on inversion contours.
inline std::complex<double> kummer_m(std::complex<double> m, std::complex<double> n, double psi)
{
  detail::require(std::isfinite(psi) && std::abs(psi) <= 700.0, ErrorKind::domain,
                  "complex Kummer M supports |psi| <= 700");
  std::complex<double> term{1.0, 0.0};
  std::complex<double> sum{1.0, 0.0};
  for (std::size_t k = 0; k < detail::kummer_max_terms; ++k) {
    const double kd = static_cast<double>(k);
    term *= (m + kd) / ((n + kd) * (kd + 1.0)) * psi;
    sum += term;
    const bool decreasing = std::abs((m + kd + 1.0) * psi) < std::abs((n + kd + 1.0) * (kd + 2.0));
    if (std::abs(term) == 0.0 || (decreasing && std::abs(term) <= 1e-17 * std::abs(sum))) { return sum; }
  }
  throw Error(ErrorKind::numerical, "complex Kummer series did not converge within 10000 terms");
}

}  // namespace bubble

#endif  // BUBBLE_KUMMER_HPP_
