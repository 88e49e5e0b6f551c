#ifndef BUBBLE_FPT_HPP_
#define BUBBLE_FPT_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/kummer.hpp"
#include "bubble/laplace.hpp"
#include "bubble/model.hpp"
#include "bubble/parallel.hpp"
#include "bubble/quadrature.hpp"
#include "bubble/random.hpp"
#include "bubble/special.hpp"

namespace bubble
{

namespace detail
{

template<DriftParameters P>
void require_standard(const P & p, const char * what)
{
  require(p.sigma() == 1.0, ErrorKind::invalid_input,
          std::string(what) + " needs the standard form (sigma = 1); rescale with scale_to_standard");
}

inline void require_time(double t)
{
  require(std::isfinite(t) && t > 0.0, ErrorKind::domain, "time must be > 0");
}

inline void require_above_origin(double x)
{
  require(std::isfinite(x) && x > 0.0, ErrorKind::domain, "start must lie above the boundary at 0 (x > 0)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact Laplace transform

/// Substituted quantities of the downward first-passage Laplace transform.
struct LtQuery
{
  double beta;
  double m;
  double n;
  double psi;
  double lambda;
  double psi_hat;
  double lambda_hat;

  template<DriftParameters P>
  static LtQuery make(double beta, const P & p, double x, double a)
  {
    const double eps = p.epsilon();
    const double alpha = p.alpha();
    const double root = std::sqrt(p.c() * p.c() * eps * eps + 2.0 * beta);
    const double drift = eps * p.c();
    return LtQuery{beta,
                   (root - drift) / (2.0 * alpha),
                   (root + alpha) / alpha,
                   eps / alpha * std::exp(-2.0 * alpha * x),
                   x * (drift - root),
                   eps / alpha * std::exp(-2.0 * alpha * a),
                   a * (drift - root)};
  }
};

/**
 * @brief E_x[exp(-beta tau_a)] for the downward passage from x to a < x:
 *   e^lambda M(m, n, psi) / (e^lambda_hat M(m, n, psi_hat)), evaluated in log space.
 */
template<DriftParameters P>
double lt_exact(double beta, const P & p, double x, double a)
{
  detail::require_standard(p, "lt_exact");
  detail::require(x > a, ErrorKind::unsupported_direction,
                  "only the downward passage (x > a) has a Laplace transform");
  detail::require(std::isfinite(beta) && beta >= 0.0, ErrorKind::domain, "beta must be >= 0");
  if (beta == 0.0) { return 1.0; }
  const LtQuery q = LtQuery::make(beta, p, x, a);
  const double root = std::sqrt(p.c() * p.c() * p.epsilon() * p.epsilon() + 2.0 * beta);
  const double log_ratio = (x - a) * (p.epsilon() * p.c() - root) + log_kummer_m(q.m, q.n, q.psi) -
                           log_kummer_m(q.m, q.n, q.psi_hat);
  return std::exp(log_ratio);
}

/// Complex-argument version for contour inversion.
template<DriftParameters P>
std::complex<double> lt_exact(std::complex<double> beta, const P & p, double x, double a)
{
  detail::require_standard(p, "lt_exact");
  detail::require(x > a, ErrorKind::unsupported_direction,
                  "only the downward passage (x > a) has a Laplace transform");
  const double eps = p.epsilon();
  const double alpha = p.alpha();
  const double drift = eps * p.c();
  const std::complex<double> root = std::sqrt(drift * drift + 2.0 * beta);
  const std::complex<double> m = (root - drift) / (2.0 * alpha);
  const std::complex<double> n = (root + alpha) / alpha;
  const double psi = eps / alpha * std::exp(-2.0 * alpha * x);
  const double psi_hat = eps / alpha * std::exp(-2.0 * alpha * a);
  return std::exp((x - a) * (drift - root)) * kummer_m(m, n, psi) / kummer_m(m, n, psi_hat);
}

// ---------------------------------------------------------------------------
// First-order perturbation (boundary at 0)

/**
 * @brief First-order transform f0 (1 + eps c x) + eps f0 gamma (e^{-2 alpha x} - 1) / (2 alpha (alpha + gamma)),
 * f0 = e^{-gamma x}, gamma = sqrt(2 beta). T is double or std::complex<double>.
 */
template<typename T, DriftParameters P>
T lt_perturbed(T beta, const P & p, double x)
{
  detail::require_above_origin(x);
  const double eps = p.epsilon();
  const double alpha = p.alpha();
  const T gamma = std::sqrt(2.0 * beta);
  const T f0 = std::exp(-gamma * x);
  return f0 * (1.0 + eps * p.c() * x) +
         eps * f0 * gamma * std::expm1(-2.0 * alpha * x) / (2.0 * alpha * (alpha + gamma));
}

/**
 * @brief First-order downward FPT density to 0 from x > 0:
 *   (1 + eps (c x + (1 - e^{-2ax})(a t - x) / (2 a x))) p0(t)
 *   - eps (a/4)(1 - e^{-2ax}) e^{a^2 t/2 + a x} Erfc(x/sqrt(2t) + a sqrt(t/2)).
 *
 * The exponential-times-Erfc product equals e^{-x^2/2t} erfcx(z) exactly,
 * which never overflows.
 */
template<DriftParameters P>
double fptd_perturbed(double t, const P & p, double x)
{
  detail::require_standard(p, "fptd_perturbed");
  detail::require_above_origin(x);
  detail::require_time(t);
  const double eps = p.epsilon();
  const double alpha = p.alpha();
  const double decay = -std::expm1(-2.0 * alpha * x);
  const double p0 = brownian_fpt_density(t, x);
  const double first = (1.0 + eps * (p.c() * x + decay * (alpha * t - x) / (2.0 * alpha * x))) * p0;
  const double z = x / std::sqrt(2.0 * t) + alpha * std::sqrt(0.5 * t);
  const double second = eps * 0.25 * alpha * decay * std::exp(-x * x / (2.0 * t)) * erfcx(z);
  return first - second;
}

enum class TailSide { left, right };

/**
 * @brief Short-time (left) and long-time (right) asymptotic forms of fptd_perturbed:
 *   left:  (1 + eps (c x - D / (2 alpha))) p0(t)
 *   right: (1 + eps (c x - D / (2 alpha) + D / (alpha^2 x))) p0(t),  D = 1 - e^{-2 alpha x}.
 * The right form keeps the x / sqrt(2t) part of the Erfc argument, which
 * contributes at the same order as the alpha sqrt(t/2) part.
 */
template<DriftParameters P>
double fptd_tail(double t, const P & p, double x, TailSide side)
{
  detail::require_standard(p, "fptd_tail");
  detail::require_above_origin(x);
  detail::require_time(t);
  const double eps = p.epsilon();
  const double alpha = p.alpha();
  const double decay = -std::expm1(-2.0 * alpha * x);
  const double p0 = brownian_fpt_density(t, x);
  if (side == TailSide::left) { return (1.0 + eps * (p.c() * x - decay / (2.0 * alpha))) * p0; }
  return (1.0 + eps * (p.c() * x - decay / (2.0 * alpha) + decay / (alpha * alpha * x))) * p0;
}

/// Constant K with fptd_perturbed(t) ~ K p0(t) as t grows.
template<DriftParameters P>
double right_tail_factor(const P & p, double x)
{
  const double alpha = p.alpha();
  const double decay = -std::expm1(-2.0 * alpha * x);
  return 1.0 + p.epsilon() * (p.c() * x - decay / (2.0 * alpha) + decay / (alpha * alpha * x));
}

/**
 * @brief Total mass of fptd_perturbed: quadrature on (0, 1e4] plus the
 * right-tail form integrated in closed form, K erf(x / sqrt(2 T)).
 */
template<DriftParameters P>
double fptd_total_mass(const P & p, double x, double cutoff = 1e4)
{
  detail::require_above_origin(x);
  auto f = [&](double t) { return t <= 0.0 ? 0.0 : fptd_perturbed(t, p, x); };
  std::vector<double> breaks;
  for (double b = 1e-3; b < cutoff; b *= 4.0) { breaks.push_back(b); }
  const auto body = quad::integrate(f, 0.0, cutoff, {1e-13, 1e-12, 8000}, breaks);
  return body.value + right_tail_factor(p, x) * std::erf(x / std::sqrt(2.0 * cutoff));
}

/// The model seen from a boundary: standard-form shifted parameters and the start above 0.
struct BoundaryFrame
{
  ShiftedParams params;
  double y;
};

/**
 * @brief Maps (p, x, a) to the boundary-at-0 problem: scale by 1/sigma, then
 * shift the state by the boundary, (eps, c) -> (eps e^{-2 alpha a}, c e^{2 alpha a}).
 */
inline BoundaryFrame shift_to_boundary(const ModelParams & p, double x, double a)
{
  detail::require(std::isfinite(x) && std::isfinite(a), ErrorKind::invalid_input, "levels must be finite");
  detail::require(a < x, ErrorKind::unsupported_direction,
                  "only downward first passage (a < x) is supported");
  const double s = p.sigma();
  const ShiftedParams standard(p.epsilon() / s, p.alpha() * s, p.c());
  return BoundaryFrame{standard.shifted_by(a / s), (x - a) / s};
}

/// Probability of reaching a before t; `unclamped` keeps the raw first-order value.
struct RunningMinProbability
{
  double value;
  double unclamped;
  bool clamped;
};

/**
 * @brief P(min_{u <= t} X_u <= a) from the first-order density after the
 * boundary shift. The first-order mass is 1 + eps c x, so the raw integral may
 * exceed 1; it is clamped to [0, 1] and the event is reported.
 */
inline RunningMinProbability running_min_cdf(double t, double a, const ModelParams & p, double x)
{
  detail::require_time(t);
  detail::require(a <= x, ErrorKind::unsupported_direction,
                  "running minimum above the start (a > x) is not a downward passage");
  if (a == x) { return {1.0, 1.0, false}; }
  const BoundaryFrame frame = shift_to_boundary(p, x, a);
  auto f = [&](double u) { return u <= 0.0 ? 0.0 : fptd_perturbed(u, frame.params, frame.y); };
  const auto r = quad::integrate(f, 0.0, t, {1e-14, 1e-12, 8000});
  detail::require(std::isfinite(r.value), ErrorKind::numerical, "running-minimum quadrature failed");
  const double clamped = std::clamp(r.value, 0.0, 1.0);
  return {clamped, r.value, clamped != r.value};
}

struct FptDensityCurve
{
  std::vector<double> times;
  std::vector<double> densities;
  std::vector<double> left_tail;
  std::vector<double> right_tail;
  ModelParams params;
  double x;
  double a;
};

/// fptd_perturbed and both tail forms on a time grid, for a general boundary a < x.
inline FptDensityCurve fptd_curve(const ModelParams & p, double x, double a, std::span<const double> times)
{
  const BoundaryFrame frame = shift_to_boundary(p, x, a);
  FptDensityCurve out{{}, {}, {}, {}, p, x, a};
  out.times.assign(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    detail::require(i == 0 || times[i] > times[i - 1], ErrorKind::invalid_input, "times must be increasing");
    out.densities.push_back(fptd_perturbed(times[i], frame.params, frame.y));
    out.left_tail.push_back(fptd_tail(times[i], frame.params, frame.y, TailSide::left));
    out.right_tail.push_back(fptd_tail(times[i], frame.params, frame.y, TailSide::right));
  }
  return out;
}

/// Time of the largest first-order density value (log-grid scan refined by golden section).
template<DriftParameters P>
double fptd_peak_time(const P & p, double x)
{
  detail::require_above_origin(x);
  const double lo = std::log(1e-8);
  const double hi = std::log(1e4);
  constexpr std::size_t grid = 600;
  auto g = [&](double log_t) { return fptd_perturbed(std::exp(log_t), p, x); };
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= grid; ++i) {
    const double v = g(lo + (hi - lo) * static_cast<double>(i) / grid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double step = (hi - lo) / grid;
  const double left = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double right = lo + step * static_cast<double>(std::min(best + 1, grid));
  return std::exp(quad::golden_section_max(g, left, right, 1e-12));
}

// ---------------------------------------------------------------------------
// Second-order error

namespace detail
{

template<DriftParameters P>
double eta_unchecked(double t, double x, const P & p)
{
  if (t <= 0.0) { return 0.0; }
  const double alpha = p.alpha();
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double gauss = std::exp(-x * x / (2.0 * t));
  const double e2 = std::exp(-2.0 * alpha * x);
  const double z = x / std::sqrt(2.0 * t) + alpha * std::sqrt(0.5 * t);
  // e^{a^2 t/2} Erfc(z) = e^{-x^2/2t - a x} erfcx(z)
  const double m1 = gauss * std::exp(-alpha * x) * erfcx(z);
  const double m2 = gauss * (alpha * alpha * t * t - (alpha * x + 1.0) * t + x * x) / (t * t * std::sqrt(t));
  const double m3 = gauss * (alpha * t - x) / (t * std::sqrt(t));
  return -0.5 * alpha * alpha * std::cosh(alpha * x) * m1 - std::expm1(-2.0 * alpha * x) * inv_sqrt_2pi / (2.0 * alpha) * m2 +
         e2 * inv_sqrt_2pi * m3 + p.c() * (2.0 - x * x / t) * brownian_fpt_density(t, x);
}

}  // namespace detail

/**
 * @brief Kernel eta(t, x) of the second-order error representation,
 * the inverse transform of the x-derivative of the first-order correction.
 */
template<DriftParameters P>
double eta(double t, double x, const P & p)
{
  detail::require_time(t);
  detail::require_above_origin(x);
  return detail::eta_unchecked(t, x, p);
}

struct ErrorEstimate
{
  double t;
  double q_hat;
  double std_error;
  /// fptd_perturbed(t), the first-order density.
  double density;
  /// density / (density + q_hat).
  double ratio;
  /// |q_hat| / |density + q_hat| = |1 - ratio|.
  double relative_error;
};

/**
 * @brief Monte Carlo estimate of the second-order density error
 *   q(t) = eps^2 E_x[ int_0^{t ^ tau} (e^{-2 alpha X_u} - c) eta(t - u, X_u) du ]
 * for several t at once.
 *
 * Paths are Euler discretisations of the full process with boundary 0; the
 * time integral uses the trapezoid rule on the grid, with the state at a
 * detected hit replaced by the boundary value 0.
 */
template<DriftParameters P>
std::vector<ErrorEstimate> error_estimates(std::span<const double> ts, const P & p, double x, std::size_t n_paths,
                                           double dt, std::uint64_t seed)
{
  detail::require_standard(p, "error_estimate");
  detail::require(x > 0.0, ErrorKind::unsupported_direction, "only downward first passage (x > 0) is supported");
  detail::require(std::isfinite(dt) && dt > 0.0, ErrorKind::invalid_input, "dt must be > 0");
  detail::require(n_paths >= 2, ErrorKind::invalid_input, "error estimate needs at least 2 paths");
  detail::require(!ts.empty(), ErrorKind::invalid_input, "no evaluation times");
  double horizon = 0.0;
  for (double t : ts) {
    detail::require_time(t);
    horizon = std::max(horizon, t);
  }

  const std::size_t n_t = ts.size();
  const double eps = p.epsilon();
  std::vector<double> sums(n_t, 0.0);
  std::vector<double> squares(n_t, 0.0);

  if (eps != 0.0) {
    const std::size_t n_blocks = (n_paths + mc_block_size - 1) / mc_block_size;
    std::vector<std::vector<double>> block_sum(n_blocks, std::vector<double>(n_t, 0.0));
    std::vector<std::vector<double>> block_sq(n_blocks, std::vector<double>(n_t, 0.0));
    const double two_alpha = 2.0 * p.alpha();
    const double c = p.c();
    const double vol = std::sqrt(dt);
    auto h = [&](double state) { return std::exp(-two_alpha * state) - c; };

    for_each_block(n_paths, mc_block_size, [&](std::size_t b, std::size_t begin, std::size_t end) {
      std::vector<double> acc(n_t);
      std::vector<double> prev(n_t);
      for (std::size_t i = begin; i < end; ++i) {
        Rng rng(seed, i);
        std::size_t open = n_t;
        for (std::size_t j = 0; j < n_t; ++j) {
          acc[j] = 0.0;
          prev[j] = h(x) * detail::eta_unchecked(ts[j], x, p);
        }
        double state = x;
        double u = 0.0;
        for (std::size_t k = 1; open > 0; ++k) {
          const double u_next = dt * static_cast<double>(k);
          state += eps * h(state) * dt + vol * rng.normal();
          const bool hit = state <= 0.0;
          for (std::size_t j = 0; j < n_t; ++j) {
            const double t = ts[j];
            if (t <= u) { continue; }
            if (hit || u_next >= t) {
              // eta(0, .) = 0 closes the integral at t; a hit ends it on the boundary
              const double end = std::min(u_next, t);
              const double g_end = end < t ? h(0.0) * detail::eta_unchecked(t - end, 0.0, p) : 0.0;
              acc[j] += 0.5 * (end - u) * (prev[j] + g_end);
              --open;
              continue;
            }
            const double g = h(state) * detail::eta_unchecked(t - u_next, state, p);
            acc[j] += 0.5 * dt * (prev[j] + g);
            prev[j] = g;
          }
          u = u_next;
          if (hit) { break; }
        }
        for (std::size_t j = 0; j < n_t; ++j) {
          const double q = eps * eps * acc[j];
          block_sum[b][j] += q;
          block_sq[b][j] += q * q;
        }
      }
    });
    for (std::size_t b = 0; b < n_blocks; ++b) {
      for (std::size_t j = 0; j < n_t; ++j) {
        sums[j] += block_sum[b][j];
        squares[j] += block_sq[b][j];
      }
    }
  }

  std::vector<ErrorEstimate> out;
  out.reserve(n_t);
  const double n = static_cast<double>(n_paths);
  for (std::size_t j = 0; j < n_t; ++j) {
    const double mean = sums[j] / n;
    const double var = std::max(0.0, (squares[j] - n * mean * mean) / (n - 1.0));
    const double density = fptd_perturbed(ts[j], p, x);
    const double corrected = density + mean;
    out.push_back(ErrorEstimate{ts[j], mean, std::sqrt(var / n), density, density / corrected,
                                std::abs(mean) / std::abs(corrected)});
  }
  return out;
}

template<DriftParameters P>
ErrorEstimate error_estimate(double t, const P & p, double x, std::size_t n_paths, double dt, std::uint64_t seed)
{
  const double ts[1] = {t};
  return error_estimates(std::span<const double>(ts), p, x, n_paths, dt, seed).front();
}

}  // namespace bubble

#endif  // BUBBLE_FPT_HPP_
