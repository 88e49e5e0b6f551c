#ifndef BUBBLE_MODEL_HPP_
#define BUBBLE_MODEL_HPP_

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bubble/error.hpp"

namespace bubble
{

/// Whether a zero mean-reversion rate is admitted (the Brownian limit).
enum class EpsilonRule { positive, allow_zero };

/**
 * @brief Parameters of dX = eps (exp(-2 alpha X) - c) dt + sigma dW, X_0 = x0.
 *
 * Time is measured in years. sigma = 1 is the standard form on which the
 * density and first-passage formulas are stated; scale_to_standard maps an
 * extended model onto it.
 */
class ModelParams
{
public:
  ModelParams(double epsilon, double alpha, double c, double sigma = 1.0, double x0 = 0.0,
              EpsilonRule rule = EpsilonRule::positive)
      : epsilon_(epsilon), alpha_(alpha), c_(c), sigma_(sigma), x0_(x0)
  {
    const bool eps_ok = rule == EpsilonRule::positive ? epsilon > 0.0 : epsilon >= 0.0;
    detail::require(std::isfinite(epsilon) && eps_ok, ErrorKind::invalid_input,
                    "epsilon must be " + std::string(rule == EpsilonRule::positive ? "> 0" : ">= 0"));
    detail::require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::invalid_input, "alpha must be > 0");
    detail::require(std::isfinite(c) && c >= 0.0 && c <= 1.0, ErrorKind::invalid_input,
                    "c must lie in [0, 1]");
    detail::require(std::isfinite(sigma) && sigma > 0.0, ErrorKind::invalid_input, "sigma must be > 0");
    detail::require(std::isfinite(x0), ErrorKind::invalid_input, "x0 must be finite");
  }

  /// Pure Brownian limit eps = 0.
  static ModelParams brownian(double alpha = 1.0, double c = 0.0, double x0 = 0.0)
  {
    return ModelParams(0.0, alpha, c, 1.0, x0, EpsilonRule::allow_zero);
  }

  double epsilon() const noexcept { return epsilon_; }
  double alpha() const noexcept { return alpha_; }
  double c() const noexcept { return c_; }
  double sigma() const noexcept { return sigma_; }
  double x0() const noexcept { return x0_; }

  ModelParams with_x0(double x0) const
  {
    ModelParams out = *this;
    out.x0_ = x0;
    return out;
  }

  /// State where the drift vanishes, -ln(c) / (2 alpha); +inf for c = 0.
  double equilibrium_level() const noexcept { return -std::log(c_) / (2.0 * alpha_); }

  bool operator==(const ModelParams &) const = default;

private:
  double epsilon_;
  double alpha_;
  double c_;
  double sigma_;
  double x0_;
};

/**
 * @brief Standard-form drift parameters with c only bounded below.
 *
 * Moving the boundary of a first-passage problem to the origin turns
 * (eps, c) into (eps e^{-2 alpha a}, c e^{2 alpha a}); the shifted c may
 * exceed 1, which ModelParams rejects.
 */
class ShiftedParams
{
public:
  ShiftedParams(double epsilon, double alpha, double c)
      : epsilon_(epsilon), alpha_(alpha), c_(c)
  {
    detail::require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorKind::invalid_input,
                    "epsilon must be >= 0");
    detail::require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::invalid_input, "alpha must be > 0");
    detail::require(std::isfinite(c) && c >= 0.0, ErrorKind::invalid_input, "c must be >= 0");
  }

  explicit ShiftedParams(const ModelParams & p) : ShiftedParams(p.epsilon(), p.alpha(), p.c()) {}

  double epsilon() const noexcept { return epsilon_; }
  double alpha() const noexcept { return alpha_; }
  double c() const noexcept { return c_; }
  double sigma() const noexcept { return 1.0; }

  /// Parameters of Y = X - a, the process seen from a boundary at level a.
  ShiftedParams shifted_by(double a) const
  {
    return ShiftedParams(epsilon_ * std::exp(-2.0 * alpha_ * a), alpha_, c_ * std::exp(2.0 * alpha_ * a));
  }

  bool operator==(const ShiftedParams &) const = default;

private:
  double epsilon_;
  double alpha_;
  double c_;
};

/// Anything carrying standard-form drift parameters.
template<typename P>
concept DriftParameters = requires(const P & p) {
  { p.epsilon() } -> std::convertible_to<double>;
  { p.alpha() } -> std::convertible_to<double>;
  { p.c() } -> std::convertible_to<double>;
  { p.sigma() } -> std::convertible_to<double>;
};

/// Extended model mapped to sigma = 1; levels scale by level_factor = 1 / sigma.
struct StandardForm
{
  ModelParams params;
  double level_factor;

  double scale_level(double level) const noexcept { return level * level_factor; }
};

/// (eps, alpha, c, sigma, x) -> (eps / sigma, alpha sigma, c, 1, x / sigma).
inline StandardForm scale_to_standard(const ModelParams & p)
{
  const double s = p.sigma();
  if (s == 1.0) { return StandardForm{p, 1.0}; }
  const EpsilonRule rule = p.epsilon() > 0.0 ? EpsilonRule::positive : EpsilonRule::allow_zero;
  return StandardForm{ModelParams(p.epsilon() / s, p.alpha() * s, p.c(), 1.0, p.x0() / s, rule), 1.0 / s};
}

// ---------------------------------------------------------------------------
// Price data

/**
 * @brief Observed prices with ISO-8601 date labels.
 *
 * Dates are opaque ordered strings; ISO dates order lexicographically.
 */
class PriceSeries
{
public:
  PriceSeries(std::vector<std::string> dates, std::vector<double> prices)
      : dates_(std::move(dates)), prices_(std::move(prices))
  {
    detail::require(dates_.size() == prices_.size(), ErrorKind::invalid_input,
                    "dates and prices differ in length");
    detail::require(prices_.size() >= 2, ErrorKind::invalid_input, "a price series needs at least 2 points");
    for (std::size_t i = 0; i < prices_.size(); ++i) {
      detail::require(std::isfinite(prices_[i]) && prices_[i] > 0.0, ErrorKind::invalid_input,
                      "non-positive price at index " + std::to_string(i));
      if (i > 0) {
        detail::require(dates_[i - 1] < dates_[i], ErrorKind::invalid_input,
                        "dates must be strictly increasing (at " + dates_[i] + ")");
      }
    }
  }

  /// Series labelled by position, for synthetic data.
  static PriceSeries unlabelled(std::vector<double> prices)
  {
    std::vector<std::string> dates(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
      std::string label = std::to_string(i);
      dates[i] = std::string(10 - std::min<std::size_t>(10, label.size()), '0') + label;
    }
    return PriceSeries(std::move(dates), std::move(prices));
  }

  std::size_t size() const noexcept { return prices_.size(); }
  const std::vector<std::string> & dates() const noexcept { return dates_; }
  const std::vector<double> & prices() const noexcept { return prices_; }

private:
  std::vector<std::string> dates_;
  std::vector<double> prices_;
};

/// Normalised log-prices ln(P_t / P_0); values[0] is exactly 0.
class LogSeries
{
public:
  LogSeries(std::vector<std::string> dates, std::vector<double> values)
      : dates_(std::move(dates)), values_(std::move(values))
  {
    detail::require(dates_.size() == values_.size(), ErrorKind::invalid_input,
                    "dates and values differ in length");
  }

  explicit LogSeries(std::vector<double> values) : dates_(values.size()), values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string> & dates() const noexcept { return dates_; }
  const std::vector<double> & values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Inclusive slice [first, last].
  LogSeries slice(std::size_t first, std::size_t last) const
  {
    detail::require(first <= last && last < size(), ErrorKind::invalid_input, "slice out of range");
    return LogSeries(std::vector<std::string>(dates_.begin() + first, dates_.begin() + last + 1),
                     std::vector<double>(values_.begin() + first, values_.begin() + last + 1));
  }

private:
  std::vector<std::string> dates_;
  std::vector<double> values_;
};

/// Regime boundaries t1 < t2 < t3 (indices) plus the observed equilibrium level.
struct RegimeSegmentation
{
  std::size_t t1;
  std::size_t t2;
  std::size_t t3;
  double x_r;

  void validate(std::size_t series_length) const
  {
    detail::require(0 < t1 && t1 < t2 && t2 < t3 && t3 < series_length, ErrorKind::invalid_input,
                    "regime indices must satisfy 0 < t1 < t2 < t3 < " + std::to_string(series_length));
    detail::require(std::isfinite(x_r) && x_r > 0.0, ErrorKind::invalid_equilibrium,
                    "equilibrium level must be > 0");
  }
};

inline LogSeries log_transform(const PriceSeries & series)
{
  const auto & prices = series.prices();
  std::vector<double> values(prices.size());
  const double p0 = prices.front();
  values[0] = 0.0;
  for (std::size_t i = 1; i < prices.size(); ++i) {
    detail::require(prices[i] > 0.0, ErrorKind::invalid_input, "non-positive price");
    values[i] = std::log(prices[i] / p0);
  }
  return LogSeries(series.dates(), std::move(values));
}

/// r_t = x_t - x_{t-1}.
inline std::vector<double> log_returns(std::span<const double> values)
{
  detail::require(values.size() >= 2, ErrorKind::invalid_input, "log returns need at least 2 points");
  std::vector<double> out(values.size() - 1);
  for (std::size_t i = 1; i < values.size(); ++i) { out[i - 1] = values[i] - values[i - 1]; }
  return out;
}

inline std::vector<double> log_returns(const LogSeries & series) { return log_returns(series.values()); }

}  // namespace bubble

#endif  // BUBBLE_MODEL_HPP_
