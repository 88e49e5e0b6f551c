#ifndef BUBBLE_SDE_HPP_
#define BUBBLE_SDE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/model.hpp"
#include "bubble/parallel.hpp"
#include "bubble/quadrature.hpp"
#include "bubble/random.hpp"
#include "bubble/special.hpp"

namespace bubble
{

/// Default simulation step in years (250 trading days).
inline constexpr double default_dt = 1.0 / 250.0;

/// eps (exp(-2 alpha x) - c). Volatility enters only the diffusion term.
template<DriftParameters P>
inline double drift(double x, const P & p) noexcept
{
  return p.epsilon() * (std::exp(-2.0 * p.alpha() * x) - p.c());
}

/// Brownian increments on a uniform grid, each N(0, dt).
class NoiseGrid
{
public:
  NoiseGrid(std::vector<double> increments, double dt) : increments_(std::move(increments)), dt_(dt)
  {
    detail::require(std::isfinite(dt) && dt > 0.0, ErrorKind::invalid_input, "dt must be > 0");
    for (double dw : increments_) {
      detail::require(std::isfinite(dw), ErrorKind::invalid_input, "noise increments must be finite");
    }
  }

  static NoiseGrid gaussian(std::size_t n_steps, double dt, std::uint64_t seed, std::uint64_t stream = 0)
  {
    detail::require(std::isfinite(dt) && dt > 0.0, ErrorKind::invalid_input, "dt must be > 0");
    Rng rng(seed, stream);
    std::vector<double> dw(n_steps);
    const double sd = std::sqrt(dt);
    for (auto & v : dw) { v = sd * rng.normal(); }
    return NoiseGrid(std::move(dw), dt);
  }

  /// Same Brownian path sampled every `factor` steps.
  NoiseGrid coarsened(std::size_t factor) const
  {
    detail::require(factor >= 1 && increments_.size() % factor == 0, ErrorKind::invalid_input,
                    "coarsening factor must divide the number of steps");
    std::vector<double> dw(increments_.size() / factor, 0.0);
    for (std::size_t i = 0; i < increments_.size(); ++i) { dw[i / factor] += increments_[i]; }
    return NoiseGrid(std::move(dw), dt_ * static_cast<double>(factor));
  }

  std::size_t size() const noexcept { return increments_.size(); }
  double dt() const noexcept { return dt_; }
  const std::vector<double> & increments() const noexcept { return increments_; }

private:
  std::vector<double> increments_;
  double dt_;
};

struct Trajectory
{
  std::vector<double> times;
  std::vector<double> states;
  std::uint64_t seed{0};
};

namespace detail
{

inline void check_grid(double horizon, std::size_t n_steps, const NoiseGrid & noise)
{
  require(n_steps > 0, ErrorKind::invalid_input, "n_steps must be > 0");
  require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::invalid_input, "horizon must be > 0");
  require(noise.size() == n_steps, ErrorKind::invalid_input, "noise length must equal n_steps");
  const double dt = horizon / static_cast<double>(n_steps);
  require(std::abs(noise.dt() - dt) <= 1e-9 * dt, ErrorKind::invalid_input,
          "noise dt does not match horizon / n_steps");
}

/**
 * Running trapezoid value of int_0^t exp(g_s) ds, held as value * exp(shift)
 * so the exponent can grow without overflow.
 */
class ExponentialFunctional
{
public:
  explicit ExponentialFunctional(double g0) : shift_(g0), last_(1.0) {}

  void advance(double g_next, double dt)
  {
    double next = std::exp(g_next - shift_);
    if (next > 1e250) {
      rescale(g_next);
      next = 1.0;
    }
    scaled_ += 0.5 * dt * (last_ + next);
    last_ = next;
    if (scaled_ > 1e250) { rescale(shift_ + std::log(scaled_)); }
  }

  double log_value() const noexcept
  {
    return scaled_ > 0.0 ? shift_ + std::log(scaled_) : -std::numeric_limits<double>::infinity();
  }

  double value() const noexcept { return scaled_ * std::exp(shift_); }

  /// log(1 + k I) for k > 0.
  double log1p_scaled(double log_k) const noexcept
  {
    if (scaled_ <= 0.0) { return 0.0; }
    if (shift_ == 0.0) { return std::log1p(std::exp(log_k) * scaled_); }
    return softplus(log_k + log_value());
  }

private:
  void rescale(double new_shift)
  {
    const double factor = std::exp(shift_ - new_shift);
    scaled_ *= factor;
    last_ *= factor;
    shift_ = new_shift;
  }

  double shift_;
  double last_;
  double scaled_{0.0};
};

}  // namespace detail

/// Trapezoid values of int_0^{t_k} exp(-2 alpha (W_s - mu s)) ds along the noise grid.
inline std::vector<double> exponential_functional(const NoiseGrid & noise, double alpha, double mu)
{
  std::vector<double> out(noise.size() + 1, 0.0);
  detail::ExponentialFunctional acc(0.0);
  double w = 0.0;
  for (std::size_t k = 0; k < noise.size(); ++k) {
    w += noise.increments()[k];
    const double t = noise.dt() * static_cast<double>(k + 1);
    acc.advance(-2.0 * alpha * (w - mu * t), noise.dt());
    out[k + 1] = acc.value();
  }
  return out;
}

/// Exact-solution path split into its parts: X = x + W - c eps t + correction.
struct ExactPath
{
  Trajectory trajectory;
  /// (1 / 2 alpha) ln(1 + 2 eps alpha e^{-2 alpha x} I_t).
  std::vector<double> correction;
};

/**
 * @brief Pathwise solution
 *   X_t = x + W_t - c eps t + (1/2a) ln(1 + 2 eps a e^{-2 a x} int_0^t e^{-2a(W_s - c eps s)} ds)
 * with the time integral taken by the trapezoid rule on the noise grid.
 * Standard form only (sigma = 1).
 */
inline ExactPath exact_path_parts(const ModelParams & p, double horizon, std::size_t n_steps,
                                  const NoiseGrid & noise)
{
  detail::check_grid(horizon, n_steps, noise);
  detail::require(p.sigma() == 1.0, ErrorKind::invalid_input,
                  "exact_path needs the standard form; rescale with scale_to_standard");
  const double alpha = p.alpha();
  const double mu = p.c() * p.epsilon();
  const double x = p.x0();
  const double dt = noise.dt();

  ExactPath out;
  auto & traj = out.trajectory;
  traj.times.resize(n_steps + 1);
  traj.states.resize(n_steps + 1);
  out.correction.assign(n_steps + 1, 0.0);
  traj.times[0] = 0.0;
  traj.states[0] = x;

  const bool drift_free = p.epsilon() == 0.0;
  const double log_k = drift_free ? 0.0 : std::log(2.0 * p.epsilon() * alpha) - 2.0 * alpha * x;
  detail::ExponentialFunctional integral(0.0);
  double w = 0.0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    w += noise.increments()[k - 1];
    const double t = dt * static_cast<double>(k);
    traj.times[k] = t;
    double corr = 0.0;
    if (!drift_free) {
      integral.advance(-2.0 * alpha * (w - mu * t), dt);
      corr = integral.log1p_scaled(log_k) / (2.0 * alpha);
    }
    out.correction[k] = corr;
    traj.states[k] = x + w - mu * t + corr;
  }
  return out;
}

inline Trajectory exact_path(const ModelParams & p, double horizon, std::size_t n_steps, const NoiseGrid & noise)
{
  return exact_path_parts(p, horizon, n_steps, noise).trajectory;
}

/// Exact path for sigma != 1: simulate the standard form and map states back by sigma.
inline Trajectory exact_path_extended(const ModelParams & p, double horizon, std::size_t n_steps,
                                      const NoiseGrid & noise)
{
  const auto standard = scale_to_standard(p);
  Trajectory traj = exact_path(standard.params, horizon, n_steps, noise);
  for (auto & s : traj.states) { s *= p.sigma(); }
  traj.states[0] = p.x0();
  return traj;
}

/// X_{k+1} = X_k + eps (e^{-2 alpha X_k} - c) dt + sigma dW_k.
inline Trajectory euler_path(const ModelParams & p, double horizon, std::size_t n_steps, const NoiseGrid & noise)
{
  detail::check_grid(horizon, n_steps, noise);
  const double dt = noise.dt();
  Trajectory traj;
  traj.times.resize(n_steps + 1);
  traj.states.resize(n_steps + 1);
  traj.times[0] = 0.0;
  traj.states[0] = p.x0();
  double x = p.x0();
  for (std::size_t k = 1; k <= n_steps; ++k) {
    x += drift(x, p) * dt + p.sigma() * noise.increments()[k - 1];
    traj.times[k] = dt * static_cast<double>(k);
    traj.states[k] = x;
  }
  return traj;
}

/// Y = exp(2 alpha X), the Shiryaev-process representation.
inline Trajectory transform_y(const Trajectory & traj, const ModelParams & p)
{
  Trajectory out = traj;
  for (auto & s : out.states) { s = std::exp(2.0 * p.alpha() * s); }
  return out;
}

inline Trajectory inverse_transform_y(const Trajectory & traj, const ModelParams & p)
{
  Trajectory out = traj;
  for (auto & s : out.states) { s = std::log(s) / (2.0 * p.alpha()); }
  return out;
}

/// Z = exp(-2 alpha X).
inline Trajectory transform_z(const Trajectory & traj, const ModelParams & p)
{
  Trajectory out = traj;
  for (auto & s : out.states) { s = std::exp(-2.0 * p.alpha() * s); }
  return out;
}

/**
 * @brief Scale function of Z = exp(-2 alpha X) anchored at A:
 *   s(z) = A^{1+mu} e^{-A k} int_A^z xi^{-1-mu} e^{k xi} d xi,  mu = c eps / alpha, k = eps / alpha.
 *
 * Integrated in w = ln(xi), where the integrand exp(-mu w + k e^w) is smooth.
 */
inline double scale_function_z(double z, double A, const ModelParams & p)
{
  detail::require(z > 0.0 && std::isfinite(z), ErrorKind::domain, "scale function needs z > 0");
  detail::require(A > 0.0 && std::isfinite(A), ErrorKind::domain, "scale function needs A > 0");
  if (z == A) { return 0.0; }
  const double mu = p.c() * p.epsilon() / p.alpha();
  const double k = p.epsilon() / p.alpha();
  const double log_pref = (1.0 + mu) * std::log(A) - A * k;
  auto integrand = [&](double w) { return std::exp(log_pref - mu * w + k * std::exp(w)); };
  const auto r = quad::integrate(integrand, std::log(A), std::log(z), {0.0, 1e-11, 8000});
  detail::require(std::isfinite(r.value), ErrorKind::numerical, "scale function overflow");
  return r.value;
}

/// First grid times at or below a; censored paths carry +inf.
struct FptSample
{
  std::vector<double> times;
  std::size_t censored{0};
  double horizon{0.0};
  double dt{0.0};

  std::size_t size() const noexcept { return times.size(); }

  double censored_fraction() const noexcept
  {
    return times.empty() ? 0.0 : static_cast<double>(censored) / static_cast<double>(times.size());
  }

  /// Fraction of all paths (censored included) with tau <= t.
  double empirical_cdf(double t) const noexcept
  {
    std::size_t hits = 0;
    for (double v : times) { hits += v <= t ? 1 : 0; }
    return times.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(times.size());
  }
};

/**
 * @brief Monte Carlo downward first-passage times by Euler stepping.
 *
 * Path i draws from Rng(seed, i); a hit is the first grid point with X <= a.
 * No Brownian-bridge correction is applied, so hits are biased late by
 * O(sqrt(dt)).
 */
template<DriftParameters P>
FptSample sample_fpt_mc(const P & p, double x, double a, double horizon, double dt, std::size_t n_paths,
                        std::uint64_t seed)
{
  detail::require(a <= x, ErrorKind::unsupported_direction,
                  "only downward first passage (a <= x) is supported");
  detail::require(std::isfinite(dt) && dt > 0.0, ErrorKind::invalid_input, "dt must be > 0");
  detail::require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::invalid_input, "horizon must be > 0");

  FptSample out;
  out.horizon = horizon;
  out.dt = dt;
  out.times.assign(n_paths, 0.0);
  if (a == x) { return out; }

  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double vol = p.sigma() * std::sqrt(dt);
  const double eps_dt = p.epsilon() * dt;
  const double two_alpha = 2.0 * p.alpha();
  const double c = p.c();
  const double inf = std::numeric_limits<double>::infinity();

  for_each_block(n_paths, mc_block_size, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(seed, i);
      double state = x;
      double hit = inf;
      for (std::size_t k = 1; k <= n_steps; ++k) {
        state += eps_dt * (std::exp(-two_alpha * state) - c) + vol * rng.normal();
        if (state <= a) {
          hit = dt * static_cast<double>(k);
          break;
        }
      }
      out.times[i] = hit;
    }
  });
  for (double t : out.times) { out.censored += std::isinf(t) ? 1 : 0; }
  return out;
}

}  // namespace bubble

#endif  // BUBBLE_SDE_HPP_
