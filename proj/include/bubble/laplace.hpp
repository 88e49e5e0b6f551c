#ifndef BUBBLE_LAPLACE_HPP_
#define BUBBLE_LAPLACE_HPP_

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <sstream>

#include "bubble/error.hpp"

namespace bubble
{

inline constexpr std::size_t default_talbot_terms = 32;

/**
 * @brief Fixed-Talbot numerical inversion of a Laplace transform.
 *
 * Contour s(theta) = r theta (cot theta + i), r = 2M / (5t), with nodes
 * theta_k = k pi / M. The transform must accept complex arguments and be
 * analytic to the right of its singularities.
 */
template<typename F>
  requires std::invocable<F &, std::complex<double>>
double invert_lt(F && transform, double t, std::size_t n_terms = default_talbot_terms)
{
  detail::require(std::isfinite(t) && t > 0.0, ErrorKind::domain, "inversion time must be > 0");
  detail::require(n_terms >= 2, ErrorKind::invalid_input, "fixed Talbot needs at least 2 terms");
  const double m = static_cast<double>(n_terms);
  const double r = 2.0 * m / (5.0 * t);

  auto fail = [&](std::size_t k, std::complex<double> s) {
    std::ostringstream msg;
    msg << "non-finite transform value on the Talbot contour (node " << k << ", s = " << s.real() << "+"
        << s.imag() << "i, t = " << t << ")";
    throw Error(ErrorKind::numerical, msg.str());
  };

  const std::complex<double> f0 = transform(std::complex<double>(r, 0.0));
  if (!std::isfinite(f0.real())) { fail(0, {r, 0.0}); }
  double sum = 0.5 * std::exp(r * t) * f0.real();
  for (std::size_t k = 1; k < n_terms; ++k) {
    const double theta = static_cast<double>(k) * std::numbers::pi / m;
    const double cot = 1.0 / std::tan(theta);
    const std::complex<double> s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    const std::complex<double> value = std::exp(t * s) * transform(s) * std::complex<double>(1.0, sigma);
    if (!std::isfinite(value.real())) { fail(k, s); }
    sum += value.real();
  }
  return r / m * sum;
}

}  // namespace bubble

#endif  // BUBBLE_LAPLACE_HPP_
