#ifndef BUBBLE_DENSITY_HPP_
#define BUBBLE_DENSITY_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/model.hpp"
#include "bubble/parallel.hpp"
#include "bubble/quadrature.hpp"
#include "bubble/random.hpp"
#include "bubble/special.hpp"

namespace bubble
{

/// Below this s = alpha^2 t the theta integrand oscillates too fast to trust.
inline constexpr double theta_reliable_s = 0.1;

struct ThetaEval
{
  double r;
  double s;
  double value;
  double abs_error_estimate;
  bool low_confidence{false};
};

namespace detail
{

inline void require_theta_args(double r, double s)
{
  require(std::isfinite(r) && r > 0.0, ErrorKind::domain, "theta needs r > 0");
  require(std::isfinite(s) && s > 0.0, ErrorKind::domain, "theta needs s > 0");
}

inline double log_theta_prefactor(double r, double s)
{
  return std::log(r) - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi * s) +
         std::numbers::pi * std::numbers::pi / (2.0 * s);
}

}  // namespace detail

/**
 * @brief Hartman-Watson kernel
 *   theta(r, s) = r / sqrt(2 pi^3 s) e^{pi^2/2s} int_0^inf e^{-v^2/2s - r cosh v} sinh v sin(pi v / s) dv.
 *
 * The prefactor is folded into the exponent of the integrand and the range is
 * split at the zeros v = k s of the sine. The upper limit is where either
 * e^{-r cosh v} or the Gaussian-times-sinh factor falls below 1e-16. The error
 * estimate adds a round-off floor proportional to int |integrand|, which is
 * what dominates once e^{pi^2/2s} is large.
 */
inline ThetaEval theta(double r, double s)
{
  detail::require_theta_args(r, s);
  const double log_tiny = std::log(1e-16);
  const double v_r = std::acosh(std::max(1.0, -log_tiny / r)) + 1.0;
  const double v_g = s + std::sqrt(s * s - 2.0 * s * log_tiny);
  const double v_max = std::min(v_r, v_g);
  const double log_pref = detail::log_theta_prefactor(r, s);

  auto f = [&](double v) {
    if (v <= 0.0) { return 0.0; }
    const double log_sinh = v > 20.0 ? v - std::numbers::ln2 : std::log(std::sinh(v));
    return std::exp(log_pref - v * v / (2.0 * s) - r * std::cosh(v) + log_sinh) * std::sin(std::numbers::pi * v / s);
  };

  std::vector<double> breaks;
  for (double k = 1.0; k * s < v_max && breaks.size() < 4000; k += 1.0) { breaks.push_back(k * s); }
  // a coarse pass over |f| sets the absolute tolerance at the round-off floor
  const auto magnitude = quad::integrate([&](double v) { return std::abs(f(v)); }, 0.0, v_max, {0.0, 1e-3, 200}, breaks);
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * magnitude.value;
  const auto res = quad::integrate(f, 0.0, v_max, {roundoff, 1e-10, 20000}, breaks);
  const double error = res.abs_error + 64.0 * std::numeric_limits<double>::epsilon() * res.abs_integral;
  ThetaEval out{r, s, res.value, error, s < theta_reliable_s || !res.converged};
  if (!std::isfinite(out.value)) {
    throw Error(ErrorKind::numerical, "theta overflowed at r = " + std::to_string(r) + ", s = " + std::to_string(s));
  }
  return out;
}

namespace detail
{

/// One draw of the Monte Carlo theta estimator, V ~ N(0, s).
inline double theta_sample(double r, double s, double v)
{
  const double log_part = -r * std::cosh(v);
  return v * std::exp(log_part) * std::sinh(v) * sinc_pi(v / s);
}

}  // namespace detail

/**
 * @brief theta_hat(r, s) = (r / 2s) e^{pi^2/2s} E[V e^{-r cosh V} sinh V sinc(V / s)], V ~ N(0, s).
 *
 * Samples are drawn in fixed blocks keyed by block index, so the estimate is
 * reproducible for any thread count. abs_error_estimate is the standard error.
 */
inline ThetaEval theta_hat(double r, double s, std::size_t n, std::uint64_t seed)
{
  detail::require_theta_args(r, s);
  detail::require(n >= 1, ErrorKind::invalid_input, "theta_hat needs n >= 1");
  const std::size_t block = 4096;
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<double> sums(n_blocks, 0.0);
  std::vector<double> squares(n_blocks, 0.0);
  const double sd = std::sqrt(s);
  for_each_block(n, block, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Rng rng(seed, b);
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double g = detail::theta_sample(r, s, sd * rng.normal());
      sum += g;
      sq += g * g;
    }
    sums[b] = sum;
    squares[b] = sq;
  });
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    sum += sums[b];
    sq += squares[b];
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  const double var = n > 1 ? std::max(0.0, (sq - nd * mean * mean) / (nd - 1.0)) : 0.0;
  const double scale = r / (2.0 * s) * std::exp(std::numbers::pi * std::numbers::pi / (2.0 * s));
  return ThetaEval{r, s, scale * mean, scale * std::sqrt(var / nd), s < theta_reliable_s};
}

struct DensityPoint
{
  double u;
  double t;
  double value;
  double abs_error_estimate{0.0};
  bool low_confidence{false};
};

namespace detail
{

/// Pieces of the fixed-time density shared by the quadrature and Monte Carlo forms.
struct DensityKernel
{
  double alpha;
  double mu;          // c eps / alpha
  double kappa;       // 2 (eps / alpha) e^{-2 alpha x}
  double s;           // alpha^2 t
  double drift_term;  // c^2 eps^2 t
  double x;

  DensityKernel(const ModelParams & p, double x_start, double t)
      : alpha(p.alpha()),
        mu(p.c() * p.epsilon() / p.alpha()),
        kappa(2.0 * p.epsilon() / p.alpha() * std::exp(-2.0 * p.alpha() * x_start)),
        s(p.alpha() * p.alpha() * t),
        drift_term(p.c() * p.c() * p.epsilon() * p.epsilon() * t),
        x(x_start)
  {}

  /// ln zeta(u; m, y) = (m/2) ln(1 + kappa y) - m alpha (u - x) - ln y.
  double log_zeta(double u, double m, double log_y) const
  {
    const double y = std::exp(log_y);
    return 0.5 * m * std::log1p(kappa * y) - m * alpha * (u - x) - log_y;
  }

  /// ln of alpha zeta(u; mu, y) exp(-(c^2 eps^2 t + 1/y + zeta(u; 2, y)) / 2).
  double log_weight(double u, double log_y) const
  {
    const double zeta2 = std::exp(log_zeta(u, 2.0, log_y));
    return std::log(alpha) + log_zeta(u, mu, log_y) - 0.5 * (drift_term + std::exp(-log_y) + zeta2);
  }
};

}  // namespace detail

/**
 * @brief Density of X_t at u from the Hartman-Watson representation,
 *   alpha int_0^inf zeta(u; mu, y) exp(-(c^2 eps^2 t + 1/y + zeta(u; 2, y)) / 2) theta(zeta(u; 1, y), alpha^2 t) dy,
 * integrated over ln y. Flagged low-confidence when alpha^2 t < 0.1.
 */
inline DensityPoint density_xt(double u, double t, const ModelParams & p, double x)
{
  detail::require(p.sigma() == 1.0, ErrorKind::invalid_input,
                  "density_xt needs the standard form (sigma = 1)");
  detail::require(std::isfinite(t) && t > 0.0, ErrorKind::domain, "density needs t > 0");
  detail::require(std::isfinite(u) && std::isfinite(x), ErrorKind::domain, "density needs finite u and x");
  const detail::DensityKernel k(p, x, t);
  bool theta_flag = false;
  auto integrand = [&](double log_y) {
    const double log_w = k.log_weight(u, log_y);
    if (log_w < -745.0) { return 0.0; }
    const double r = std::exp(k.log_zeta(u, 1.0, log_y));
    if (!(r > 0.0) || !std::isfinite(r)) { return 0.0; }
    const ThetaEval th = theta(r, k.s);
    theta_flag = theta_flag || th.low_confidence;
    // dy = y d(ln y)
    return std::exp(log_w + log_y) * th.value;
  };
  // 1/(2y) > 745 below ln y = -7.3; above ln y = 40 the kernel is negligible
  const auto res = quad::integrate(integrand, -7.5, 40.0, {1e-12, 1e-8, 400}, std::vector<double>{-2.0, 0.0, 2.0, 6.0});
  DensityPoint out{u, t, res.value, res.abs_error, k.s < theta_reliable_s || theta_flag || !res.converged};
  detail::require(std::isfinite(out.value), ErrorKind::numerical, "density quadrature overflowed");
  return out;
}

struct ProbabilityEstimate
{
  double value;
  double std_error;
};

/**
 * @brief Monte Carlo distribution function
 *   P(X_t <= u) = E[m(-1/U + u + 1, 1/Y - 1) / (U^2 Y^2)],
 * with U, Y uniform and one fresh normal V per draw inside theta_hat.
 */
inline ProbabilityEstimate cdf_xt_mc(double u, double t, const ModelParams & p, double x, std::size_t n,
                                     std::uint64_t seed)
{
  detail::require(p.sigma() == 1.0, ErrorKind::invalid_input, "cdf_xt_mc needs the standard form (sigma = 1)");
  detail::require(std::isfinite(t) && t > 0.0, ErrorKind::domain, "distribution needs t > 0");
  detail::require(n >= 2, ErrorKind::invalid_input, "cdf_xt_mc needs n >= 2");
  const detail::DensityKernel k(p, x, t);
  const double sd = std::sqrt(k.s);
  const double theta_scale_log = std::numbers::pi * std::numbers::pi / (2.0 * k.s) - std::log(2.0 * k.s);

  const std::size_t block = 4096;
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<double> sums(n_blocks, 0.0);
  std::vector<double> squares(n_blocks, 0.0);
  for_each_block(n, block, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Rng rng(seed, b);
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double U = rng.uniform();
      const double Y = rng.uniform();
      const double v = sd * rng.normal();
      const double z = -1.0 / U + u + 1.0;
      const double log_y = std::log1p(-Y) - std::log(Y);
      double g = 0.0;
      const double log_w = k.log_weight(z, log_y);
      if (log_w > -745.0) {
        const double log_r = k.log_zeta(z, 1.0, log_y);
        const double sample = detail::theta_sample(std::exp(log_r), k.s, v);
        // theta_hat prefactor (r / 2s) e^{pi^2/2s} joined with the weight and the Jacobian 1/(U^2 Y^2)
        g = sample * std::exp(log_w + log_r + theta_scale_log - 2.0 * std::log(U) - 2.0 * std::log(Y));
        if (!std::isfinite(g)) { g = 0.0; }
      }
      sum += g;
      sq += g * g;
    }
    sums[b] = sum;
    squares[b] = sq;
  });
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    sum += sums[b];
    sq += squares[b];
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  const double var = std::max(0.0, (sq - nd * mean * mean) / (nd - 1.0));
  return {mean, std::sqrt(var / nd)};
}

/**
 * @brief Stationary law with density proportional to
 *   exp(-(eps / (alpha sigma^2)) e^{-2 alpha x} - (2 eps c / sigma^2) x),
 * which reduces to 1/w(x) for sigma = 1. The normaliser is computed once.
 */
class StationaryLaw
{
public:
  explicit StationaryLaw(const ModelParams & p)
      : k_(p.epsilon() / (p.alpha() * p.sigma() * p.sigma())),
        slope_(2.0 * p.epsilon() * p.c() / (p.sigma() * p.sigma())),
        alpha_(p.alpha())
  {
    if (p.c() == 0.0) {
      throw Error(ErrorKind::no_stationary_law, "c = 0: the process drifts upward and has no stationary law");
    }
    mode_ = -std::log(p.c()) / (2.0 * alpha_);
    log_peak_ = log_unnormalised(mode_);
    // grow the window until the omitted tails are below 1e-18 of the peak scale
    const double target = -42.0;
    double left = 1.0;
    while (log_unnormalised(mode_ - left) - log_peak_ > target) { left *= 1.5; }
    double right = 1.0;
    while (log_unnormalised(mode_ + right) - log_peak_ - std::log(slope_) > target) { right *= 1.5; }
    lo_ = mode_ - left;
    hi_ = mode_ + right;
    const auto res = quad::integrate([&](double y) { return std::exp(log_unnormalised(y) - log_peak_); }, lo_, hi_,
                                     {0.0, 1e-13, 8000}, std::vector<double>{mode_});
    log_norm_ = log_peak_ + std::log(res.value);
  }

  double density(double x) const { return std::exp(log_unnormalised(x) - log_norm_); }
  double mode() const noexcept { return mode_; }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

  /// E[(X - shift)^k] by quadrature over the truncation window.
  double moment(int k, double shift = 0.0) const
  {
    const auto res = quad::integrate([&](double y) { return std::pow(y - shift, k) * density(y); }, lo_, hi_,
                                     {0.0, 1e-12, 8000}, std::vector<double>{mode_});
    return res.value;
  }

  double mean() const { return moment(1); }
  double variance() const { return moment(2, mean()); }
  double skewness() const
  {
    const double m = mean();
    return moment(3, m) / std::pow(moment(2, m), 1.5);
  }

  /// Probability of [a, b].
  double probability(double a, double b) const
  {
    return quad::integrate([&](double y) { return density(y); }, a, b, {0.0, 1e-12, 4000}).value;
  }

private:
  double log_unnormalised(double x) const { return -k_ * std::exp(-2.0 * alpha_ * x) - slope_ * x; }

  double k_;
  double slope_;
  double alpha_;
  double mode_{0.0};
  double log_peak_{0.0};
  double log_norm_{0.0};
  double lo_{0.0};
  double hi_{0.0};
};

inline double stationary_density(double x_eval, const ModelParams & p) { return StationaryLaw(p).density(x_eval); }

}  // namespace bubble

#endif  // BUBBLE_DENSITY_HPP_
