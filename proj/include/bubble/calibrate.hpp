#ifndef BUBBLE_CALIBRATE_HPP_
#define BUBBLE_CALIBRATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/model.hpp"

namespace bubble
{

/// Trading days in the rolling "monthly" window.
inline constexpr std::size_t monthly_window = 21;
/// Months per year used to annualise the monthly means.
inline constexpr double months_per_year = 12.0;
/// Trading days per year used to annualise the daily volatility.
inline constexpr double sigma_days_per_year = 260.0;

struct RegimeSplit
{
  LogSeries displacement;  // regime I, [0, t1]
  LogSeries boom;          // regime II, [t1, t2]
  LogSeries euphoria;      // regime III, [t2, t3]
};

/// Slices [0, t1], [t1, t2], [t2, t3]; neighbouring regimes share their boundary point.
inline RegimeSplit split_regimes(const LogSeries & series, const RegimeSegmentation & seg)
{
  seg.validate(series.size());
  return RegimeSplit{series.slice(0, seg.t1), series.slice(seg.t1, seg.t2), series.slice(seg.t2, seg.t3)};
}

/// r[k] = x[k] - x[k - window] for k = window .. len - 1.
inline std::vector<double> rolling_monthly_returns(std::span<const double> values,
                                                   std::size_t window = monthly_window)
{
  detail::require(window >= 1, ErrorKind::invalid_input, "window must be >= 1");
  detail::require(values.size() > window, ErrorKind::insufficient_data,
                  "rolling returns need at least " + std::to_string(window + 1) + " points, got " +
                      std::to_string(values.size()));
  std::vector<double> out;
  out.reserve(values.size() - window);
  for (std::size_t k = window; k < values.size(); ++k) { out.push_back(values[k] - values[k - window]); }
  return out;
}

inline std::vector<double> rolling_monthly_returns(const LogSeries & segment, std::size_t window = monthly_window)
{
  return rolling_monthly_returns(segment.values(), window);
}

struct EpsilonC
{
  double epsilon;
  double c;
  double r_bar_I;
  double r_bar_III;
};

/**
 * @brief eps = r_I - r_III and c = -r_III / (r_I - r_III) from annualised means.
 *
 * Regime I is the displacement stage with drift eps (1 - c); regime III is
 * the euphoria stage where the drift is about -eps c.
 */
inline EpsilonC estimate_eps_c(double r_bar_I, double r_bar_III)
{
  detail::require(std::isfinite(r_bar_I) && std::isfinite(r_bar_III), ErrorKind::invalid_input,
                  "mean returns must be finite");
  detail::require(r_bar_I >= 0.0 && r_bar_III <= 0.0, ErrorKind::invalid_input,
                  "need r_bar_I >= 0 >= r_bar_III");
  const double eps = r_bar_I - r_bar_III;
  if (eps == 0.0) {
    throw Error(ErrorKind::degenerate_calibration, "both regime means are 0, so epsilon = 0");
  }
  const double c = std::clamp(-r_bar_III / eps, 0.0, 1.0);
  return EpsilonC{eps, c, r_bar_I, r_bar_III};
}

/// Mean of the elements passing `keep`, times 12.
template<typename Keep>
double annualised_filtered_mean(std::span<const double> r, Keep keep, const char * what)
{
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : r) {
    if (keep(v)) {
      sum += v;
      ++count;
    }
  }
  detail::require(count > 0, ErrorKind::insufficient_data, std::string("no ") + what + " monthly returns");
  return sum / static_cast<double>(count) * months_per_year;
}

/// Filtered monthly means: nonnegative returns of regime I, nonpositive returns of regime III.
inline EpsilonC estimate_eps_c(std::span<const double> r_m_I, std::span<const double> r_m_III)
{
  const double r_I = annualised_filtered_mean(r_m_I, [](double v) { return v >= 0.0; }, "nonnegative regime-I");
  const double r_III =
      annualised_filtered_mean(r_m_III, [](double v) { return v <= 0.0; }, "nonpositive regime-III");
  return estimate_eps_c(r_I, r_III);
}

/// Sample standard deviation (n - 1) of daily log-returns, times sqrt(260).
inline double estimate_sigma(std::span<const double> values)
{
  detail::require(values.size() >= 3, ErrorKind::insufficient_data,
                  "volatility needs at least 3 points, got " + std::to_string(values.size()));
  const auto r = log_returns(values);
  double mean = 0.0;
  for (double v : r) { mean += v; }
  mean /= static_cast<double>(r.size());
  double ss = 0.0;
  for (double v : r) { ss += (v - mean) * (v - mean); }
  return std::sqrt(ss / static_cast<double>(r.size() - 1)) * std::sqrt(sigma_days_per_year);
}

inline double estimate_sigma(const LogSeries & segment_III) { return estimate_sigma(segment_III.values()); }

/// alpha = -ln(c) / (2 x_r), from e^{-2 alpha x_r} = c at the equilibrium level.
inline double estimate_alpha(double c_hat, double x_r)
{
  detail::require(std::isfinite(x_r) && x_r > 0.0, ErrorKind::invalid_equilibrium, "equilibrium level must be > 0");
  detail::require(std::isfinite(c_hat) && c_hat >= 0.0 && c_hat <= 1.0, ErrorKind::invalid_input,
                  "c must lie in [0, 1]");
  if (c_hat == 0.0 || c_hat == 1.0) {
    throw Error(ErrorKind::degenerate_calibration,
                "c = " + std::to_string(static_cast<int>(c_hat)) + " leaves alpha undefined");
  }
  return -std::log(c_hat) / (2.0 * x_r);
}

struct CalibrationReport
{
  ModelParams params;
  double r_bar_I;
  double r_bar_III;
  std::size_t sigma_inputs;
  RegimeSegmentation regimes;
  std::vector<std::string> warnings;
};

namespace detail
{

template<typename F>
auto tagged(const char * step, F && f) -> decltype(f())
{
  try {
    return f();
  } catch (const Error & e) {
    if (!e.step().empty()) { throw; }
    throw e.with_step(step);
  }
}

}  // namespace detail

/**
 * @brief Regime-based calibration of (eps, alpha, c, sigma) from prices.
 *
 * Steps: log-normalise and split into regimes; annualised filtered monthly
 * means of regimes I and III give eps and c; the daily volatility of regime III
 * gives sigma; the equilibrium level gives alpha. x0 is 0 because the series
 * is normalised by its first price. Errors carry the name of the failing step.
 */
inline CalibrationReport calibrate(const PriceSeries & series, const RegimeSegmentation & seg)
{
  std::vector<std::string> warnings;
  const LogSeries logs = log_transform(series);
  const RegimeSplit parts = detail::tagged("split_regimes", [&] { return split_regimes(logs, seg); });
  const EpsilonC ec = detail::tagged("estimate_eps_c", [&] {
    const auto r_I = rolling_monthly_returns(parts.displacement);
    const auto r_III = rolling_monthly_returns(parts.euphoria);
    return estimate_eps_c(std::span<const double>(r_I), std::span<const double>(r_III));
  });
  const double sigma = detail::tagged("estimate_sigma", [&] { return estimate_sigma(parts.euphoria); });
  const double alpha = detail::tagged("estimate_alpha", [&] { return estimate_alpha(ec.c, seg.x_r); });

  if (sigma < 1e-10) {
    warnings.push_back("regime III daily returns are constant, so sigma = 0");
    throw Error(ErrorKind::degenerate_calibration, warnings.back(), "assemble");
  }
  const ModelParams params = detail::tagged("assemble", [&] { return ModelParams(ec.epsilon, alpha, ec.c, sigma, 0.0); });
  return CalibrationReport{params, ec.r_bar_I, ec.r_bar_III, parts.euphoria.size() - 1, seg, std::move(warnings)};
}

/**
 * @brief Index of `date` in a sorted date list; a date that is not a trading
 * day maps to the next one and adds a warning.
 */
inline std::size_t date_index(const std::vector<std::string> & dates, const std::string & date,
                              std::vector<std::string> * warnings = nullptr)
{
  const auto it = std::lower_bound(dates.begin(), dates.end(), date);
  detail::require(it != dates.end(), ErrorKind::invalid_input, "date " + date + " is after the last observation");
  if (*it != date && warnings != nullptr) {
    warnings->push_back("date " + date + " not in the series; using " + *it);
  }
  return static_cast<std::size_t>(it - dates.begin());
}

inline RegimeSegmentation segmentation_from_dates(const PriceSeries & series, const std::string & d1,
                                                  const std::string & d2, const std::string & d3, double x_r,
                                                  std::vector<std::string> * warnings = nullptr)
{
  RegimeSegmentation seg{date_index(series.dates(), d1, warnings), date_index(series.dates(), d2, warnings),
                         date_index(series.dates(), d3, warnings), x_r};
  seg.validate(series.size());
  return seg;
}

}  // namespace bubble

#endif  // BUBBLE_CALIBRATE_HPP_
